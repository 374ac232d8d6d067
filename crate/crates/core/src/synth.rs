//! Deterministic synthetic corpora for end-to-end runs and tests.
//!
//! Each predicate family shares a pool of argument pairs and every predicate
//! is observed with a contiguous slice of that pool, so entailment between
//! two predicates of a family is slice containment. Every predicate is seen
//! at least once with each pair of its slice in a plain asserted sentence;
//! the remaining sentences are drawn at random and a share of them carries
//! modality. Modal sentences pick their argument pair from the whole pool
//! half of the time, which makes them noisier evidence than assertions.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::relation::ModalityTag;
use crate::tagger::DepGraph;

pub const DEFAULT_SYNTH_RELATIONS: usize = 10_000;
pub const DEFAULT_SYNTH_SEED: u64 = 7;

struct Verb {
    lemma: &'static str,
    past: &'static str,
    participle: &'static str,
    base: &'static str,
}

const fn verb(
    lemma: &'static str,
    past: &'static str,
    participle: &'static str,
    base: &'static str,
) -> Verb {
    Verb {
        lemma,
        past,
        participle,
        base,
    }
}

struct Family {
    type1: &'static str,
    type2: &'static str,
    prefix1: &'static str,
    prefix2: &'static str,
    entities1: usize,
    entities2: usize,
    pool: usize,
    portion: &'static str,
    /// Verb and its slice of the pair pool.
    predicates: &'static [(Verb, usize, usize)],
}

const FAMILIES: &[Family] = &[
    Family {
        type1: "person",
        type2: "location",
        prefix1: "Person",
        prefix2: "City",
        entities1: 40,
        entities2: 30,
        pool: 120,
        portion: "all",
        predicates: &[
            (verb("run_for", "ran_for", "run_for", "run_for"), 0, 120),
            (
                verb(
                    "campaign_in",
                    "campaigned_in",
                    "campaigned_in",
                    "campaign_in",
                ),
                0,
                100,
            ),
            (verb("elect", "elected", "elected", "elect"), 0, 50),
            (verb("win_in", "won_in", "won_in", "win_in"), 0, 40),
            (verb("visit", "visited", "visited", "visit"), 20, 120),
            (verb("tour", "toured", "toured", "tour"), 20, 120),
            (verb("live_in", "lived_in", "lived_in", "live_in"), 60, 120),
            (verb("leave", "left", "left", "leave"), 40, 90),
            (verb("move_to", "moved_to", "moved_to", "move_to"), 70, 120),
            (verb("speak_in", "spoke_in", "spoken_in", "speak_in"), 0, 80),
        ],
    },
    Family {
        type1: "organization",
        type2: "organization",
        prefix1: "Club",
        prefix2: "Club",
        entities1: 24,
        entities2: 24,
        pool: 120,
        portion: "sports",
        predicates: &[
            (verb("play", "played", "played", "play"), 0, 120),
            (verb("face", "faced", "faced", "face"), 0, 120),
            (verb("beat", "beat", "beaten", "beat"), 0, 60),
            (verb("defeat", "defeated", "defeated", "defeat"), 0, 60),
            (verb("lose_to", "lost_to", "lost_to", "lose_to"), 60, 120),
            (verb("fall_to", "fell_to", "fallen_to", "fall_to"), 60, 120),
            (
                verb("draw_with", "drew_with", "drawn_with", "draw_with"),
                30,
                90,
            ),
            (verb("host", "hosted", "hosted", "host"), 0, 120),
        ],
    },
    Family {
        type1: "person",
        type2: "organization",
        prefix1: "Person",
        prefix2: "Firm",
        entities1: 40,
        entities2: 25,
        pool: 100,
        portion: "all",
        predicates: &[
            (
                verb("work_for", "worked_for", "worked_for", "work_for"),
                0,
                100,
            ),
            (verb("join", "joined", "joined", "join"), 0, 70),
            (verb("lead", "led", "led", "lead"), 0, 30),
            (verb("head", "headed", "headed", "head"), 0, 30),
            (verb("quit", "quit", "quit", "quit"), 50, 100),
            (
                verb("criticize", "criticized", "criticized", "criticize"),
                30,
                80,
            ),
            (
                verb(
                    "resign_from",
                    "resigned_from",
                    "resigned_from",
                    "resign_from",
                ),
                50,
                100,
            ),
            (verb("praise", "praised", "praised", "praise"), 20, 100),
            (
                verb("meet_with", "met_with", "met_with", "meet_with"),
                0,
                60,
            ),
            (verb("sue", "sued", "sued", "sue"), 60, 100),
        ],
    },
];

/// Dataset rows whose predicates never occur in the corpus.
const UNSEEN_ROWS: &[&str] = &[
    "nominate.1,nominate.2\trun_for.1,run_for.2\tperson\tlocation\t1\tall",
    "govern.1,govern.2\tvisit.1,visit.2\tperson\tlocation\t0\tall",
    "hire.1,hire.2\twork_for.1,work_for.2\tperson\torganization\t0\tall",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Template {
    Plain,
    Negated,
    Modal,
    Said,
    Thought,
    Conditional,
    Counterfactual,
    SaidModal,
}

impl Template {
    const WEIGHTED: [(Template, f64); 8] = [
        (Template::Plain, 0.765),
        (Template::Negated, 0.05),
        (Template::Modal, 0.065),
        (Template::Said, 0.04),
        (Template::Thought, 0.025),
        (Template::Conditional, 0.025),
        (Template::Counterfactual, 0.02),
        (Template::SaidModal, 0.01),
    ];

    fn draw(rng: &mut ChaCha8Rng) -> Template {
        let mut u: f64 = rng.gen();
        for (t, w) in Self::WEIGHTED {
            if u < w {
                return t;
            }
            u -= w;
        }
        Template::Plain
    }

    fn gold(self) -> BTreeSet<ModalityTag> {
        use ModalityTag::*;
        match self {
            Template::Plain => BTreeSet::new(),
            Template::Negated => [Lneg].into(),
            Template::Modal => [Mod].into(),
            Template::Said => [AttSay].into(),
            Template::Thought => [AttThink].into(),
            Template::Conditional => [Cond].into(),
            Template::Counterfactual => [Count].into(),
            Template::SaidModal => [AttSay, Mod].into(),
        }
    }
}

type Row<'a> = (&'a str, &'a str, &'a str, Option<usize>, &'a str);

/// Builds one parsed sentence; returns it with the relation node already attached.
fn sentence(template: Template, a: &str, v: &Verb, b: &str, proper: bool) -> DepGraph {
    let np = if proper { "NNP" } else { "NNS" };
    let (rows, node, arg1, arg2): (Vec<Row>, usize, usize, usize) = match template {
        Template::Plain => (
            vec![
                (a, a, np, Some(1), "nsubj"),
                (v.past, v.lemma, "VBD", None, "root"),
                (b, b, np, Some(1), "obj"),
                (".", ".", ".", Some(1), "punct"),
            ],
            1,
            0,
            2,
        ),
        Template::Negated => (
            vec![
                (a, a, np, Some(3), "nsubj"),
                ("did", "do", "VBD", Some(3), "aux"),
                ("not", "not", "RB", Some(3), "advmod"),
                (v.base, v.lemma, "VB", None, "root"),
                (b, b, np, Some(3), "obj"),
                (".", ".", ".", Some(3), "punct"),
            ],
            3,
            0,
            4,
        ),
        Template::Modal => (
            vec![
                (a, a, np, Some(3), "nsubj"),
                ("may", "may", "MD", Some(3), "aux"),
                ("have", "have", "VB", Some(3), "aux"),
                (v.participle, v.lemma, "VBN", None, "root"),
                (b, b, np, Some(3), "obj"),
                (".", ".", ".", Some(3), "punct"),
            ],
            3,
            0,
            4,
        ),
        Template::Said | Template::Thought => {
            let (subj, verb_form, verb_lemma, verb_pos) = if template == Template::Said {
                ("Reporters", "said", "say", "VBD")
            } else {
                ("Analysts", "think", "think", "VBP")
            };
            (
                vec![
                    (subj, subj, "NNS", Some(1), "nsubj"),
                    (verb_form, verb_lemma, verb_pos, None, "root"),
                    ("that", "that", "IN", Some(4), "mark"),
                    (a, a, np, Some(4), "nsubj"),
                    (v.past, v.lemma, "VBD", Some(1), "ccomp"),
                    (b, b, np, Some(4), "obj"),
                    (".", ".", ".", Some(1), "punct"),
                ],
                4,
                3,
                5,
            )
        }
        Template::SaidModal => (
            vec![
                ("Reporters", "Reporters", "NNS", Some(1), "nsubj"),
                ("said", "say", "VBD", None, "root"),
                ("that", "that", "IN", Some(6), "mark"),
                (a, a, np, Some(6), "nsubj"),
                ("may", "may", "MD", Some(6), "aux"),
                ("have", "have", "VB", Some(6), "aux"),
                (v.participle, v.lemma, "VBN", Some(1), "ccomp"),
                (b, b, np, Some(6), "obj"),
                (".", ".", ".", Some(1), "punct"),
            ],
            6,
            3,
            7,
        ),
        Template::Conditional => (
            vec![
                ("If", "if", "IN", Some(2), "mark"),
                (a, a, np, Some(2), "nsubj"),
                (v.base, v.lemma, "VBP", None, "root"),
                (b, b, np, Some(2), "obj"),
            ],
            2,
            1,
            3,
        ),
        Template::Counterfactual => (
            vec![
                ("Had", "have", "VBD", Some(2), "aux"),
                (a, a, np, Some(2), "nsubj"),
                (v.participle, v.lemma, "VBN", None, "root"),
                (b, b, np, Some(2), "obj"),
            ],
            2,
            1,
            3,
        ),
    };
    DepGraph::from_rows(&rows).with_relation(node, arg1, arg2)
}

/// A generated corpus with its type map and labelled dataset.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub sentences: Vec<DepGraph>,
    /// Gold modality tags of each sentence's single relation.
    pub gold: Vec<BTreeSet<ModalityTag>>,
    pub type_map_tsv: String,
    pub dataset_tsv: String,
}

impl SynthCorpus {
    pub fn parses_jsonl(&self) -> String {
        let mut out = String::new();
        for s in &self.sentences {
            out.push_str(&s.to_json_line());
            out.push('\n');
        }
        out
    }

    /// Relations whose gold tags intersect the removal set.
    pub fn removal_tagged(&self) -> usize {
        self.gold
            .iter()
            .filter(|t| t.iter().any(|t| t.is_removal()))
            .count()
    }
}

fn entity(prefix: &str, i: usize) -> String {
    format!("{prefix}{i:02}")
}

fn pair_pool(f: &Family, rng: &mut ChaCha8Rng) -> Vec<(String, String)> {
    let mut all: Vec<(usize, usize)> = (0..f.entities1)
        .flat_map(|i| (0..f.entities2).map(move |j| (i, j)))
        .filter(|(i, j)| f.prefix1 != f.prefix2 || i != j)
        .collect();
    all.shuffle(rng);
    all.truncate(f.pool);
    all.into_iter()
        .map(|(i, j)| (entity(f.prefix1, i), entity(f.prefix2, j)))
        .collect()
}

fn predicate_name(v: &Verb) -> String {
    format!("{0}.1,{0}.2", v.lemma)
}

fn dataset(out: &mut String) {
    out.push_str("# premise\thypothesis\ttype1\ttype2\tlabel\tportion\n");
    for f in FAMILIES {
        for (p, plo, phi) in f.predicates {
            for (q, qlo, qhi) in f.predicates {
                if p.lemma == q.lemma {
                    continue;
                }
                let forward = qlo <= plo && phi <= qhi;
                let backward = plo <= qlo && qhi <= phi;
                let portion = if f.portion == "sports" {
                    "sports"
                } else if forward != backward {
                    "directional"
                } else {
                    "all"
                };
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    predicate_name(p),
                    predicate_name(q),
                    f.type1,
                    f.type2,
                    u8::from(forward),
                    portion
                );
            }
        }
    }
    for row in UNSEEN_ROWS {
        out.push_str(row);
        out.push('\n');
    }
}

/// Generates about `relations` sentences, one relation each. The output is
/// a pure function of `relations` and `seed`.
pub fn generate(relations: usize, seed: u64) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pools: Vec<Vec<(String, String)>> =
        FAMILIES.iter().map(|f| pair_pool(f, &mut rng)).collect();

    let mut items: Vec<(Template, usize, usize, usize, bool)> = Vec::new();
    for (fi, f) in FAMILIES.iter().enumerate() {
        for (vi, (_, lo, hi)) in f.predicates.iter().enumerate() {
            for k in *lo..*hi {
                items.push((Template::Plain, fi, vi, k, true));
            }
        }
    }
    while items.len() < relations {
        let fi = rng.gen_range(0..FAMILIES.len());
        let f = &FAMILIES[fi];
        let vi = rng.gen_range(0..f.predicates.len());
        let (_, lo, hi) = f.predicates[vi];
        let template = Template::draw(&mut rng);
        let k = if template != Template::Plain && template != Template::Negated && rng.gen_bool(0.5)
        {
            rng.gen_range(0..f.pool)
        } else {
            rng.gen_range(lo..hi)
        };
        let proper = !rng.gen_bool(0.02);
        items.push((template, fi, vi, k, proper));
    }
    items.shuffle(&mut rng);

    let mut sentences = Vec::with_capacity(items.len());
    let mut gold = Vec::with_capacity(items.len());
    for (i, &(template, fi, vi, k, proper)) in items.iter().enumerate() {
        let f = &FAMILIES[fi];
        let (a, b) = &pools[fi][k];
        let (a, b) = if proper {
            (a.clone(), b.clone())
        } else {
            ("officials".to_string(), "rivals".to_string())
        };
        let mut g = sentence(template, &a, &f.predicates[vi].0, &b, proper);
        g.id = Some(format!("s{i:05}"));
        g.doc = Some(format!("d{:04}", i / 20));
        sentences.push(g);
        gold.push(template.gold());
    }

    let mut type_map_tsv = String::from("# entity\ttype\n");
    let mut seen = BTreeSet::new();
    for f in FAMILIES {
        for (prefix, n, ty) in [
            (f.prefix1, f.entities1, f.type1),
            (f.prefix2, f.entities2, f.type2),
        ] {
            for i in 0..n {
                let e = entity(prefix, i);
                if seen.insert(e.clone()) {
                    let _ = writeln!(type_map_tsv, "{e}\t{ty}");
                }
            }
        }
    }

    let mut dataset_tsv = String::new();
    dataset(&mut dataset_tsv);

    SynthCorpus {
        sentences,
        gold,
        type_map_tsv,
        dataset_tsv,
    }
}
