//! Synthetic micro-text corpora and helpers for driving the binary.

#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_argmine"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "argmine {args:?} failed ({:?}):\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exited normally")
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// `(form, lemma, pos, feats)`
type Tok = (&'static str, &'static str, &'static str, &'static str);

const CLAIM: &[&[Tok]] = &[
    &[("Раздельный", "раздельный", "ADJ", "_"), ("сбор", "сбор", "NOUN", "_"), ("нужно", "нужно", "ADV", "_"), ("ввести", "ввести", "VERB", "_")],
    &[("Школьная", "школьный", "ADJ", "_"), ("форма", "форма", "NOUN", "_"), ("полезна", "полезный", "ADJ", "_")],
    &[("Город", "город", "NOUN", "_"), ("должен", "должен", "ADJ", "_"), ("строить", "строить", "VERB", "_"), ("парки", "парк", "NOUN", "_")],
];

const BODY: &[&[Tok]] = &[
    &[("это", "это", "PRON", "_"), ("стоит", "стоить", "VERB", "Tense=present|Mood=indicative|Person=3"), ("денег", "деньги", "NOUN", "_")],
    &[("люди", "человек", "NOUN", "_"), ("привыкли", "привыкнуть", "VERB", "Tense=past|Mood=indicative"), ("к", "к", "ADP", "_"), ("старому", "старый", "ADJ", "_")],
    &[("свалки", "свалка", "NOUN", "_"), ("переполнены", "переполнить", "VERB", "Tense=past"), ("давно", "давно", "ADV", "_")],
    &[("мы", "мы", "PRON", "_"), ("увидим", "увидеть", "VERB", "Tense=future|Mood=indicative|Person=1"), ("результат", "результат", "NOUN", "_")],
    &[("подумайте", "подумать", "VERB", "Mood=imperative|Person=2"), ("о", "о", "ADP", "_"), ("детях", "ребенок", "NOUN", "_")],
    &[("расходы", "расход", "NOUN", "_"), ("быстро", "быстро", "ADV", "_"), ("окупаются", "окупаться", "VERB", "Tense=present|Person=3")],
];

const PRO_OPENERS: &[&[Tok]] = &[
    &[("Кроме", "кроме", "ADP", "_"), ("того", "то", "PRON", "_"), (",", ",", "PUNCT", "_")],
    &[("Ведь", "ведь", "PART", "_")],
    &[("Поэтому", "поэтому", "ADV", "_")],
    &[("Потому", "потому", "ADV", "_"), ("что", "что", "SCONJ", "_")],
];

const OPP_OPENERS: &[&[Tok]] = &[
    &[("Однако", "однако", "ADV", "_"), (",", ",", "PUNCT", "_")],
    &[("Но", "но", "CCONJ", "_")],
    &[("Хотя", "хотя", "SCONJ", "_")],
    &[("Впрочем", "впрочем", "ADV", "_"), (",", ",", "PUNCT", "_")],
];

pub struct Adu {
    pub id: String,
    pub tokens: Vec<Tok>,
    pub kind: &'static str,
}

impl Adu {
    fn text(&self) -> String {
        let mut s = String::new();
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 && !matches!(t.0, "," | "." | "?" | "!") {
                s.push(' ');
            }
            s.push_str(t.0);
        }
        s
    }
}

/// One synthetic micro-text: a central claim plus supporting and attacking
/// ADUs. Attacks usually open with a contrastive marker, supports with a
/// causal or additive one; `noise` is the chance of a swapped opener.
pub struct MicroText {
    pub id: String,
    pub adus: Vec<Adu>,
    /// `(id, src, trg, type)`
    pub edges: Vec<(String, String, String, &'static str)>,
}

pub fn micro_corpus(n: usize, seed: u64, noise: f64) -> Vec<MicroText> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for t in 0..n {
        let mut adus = vec![Adu {
            id: "a1".into(),
            tokens: [CLAIM.choose(&mut rng).unwrap().to_vec(), vec![(".", ".", "PUNCT", "_")]].concat(),
            kind: "pro",
        }];
        let mut edges = Vec::new();
        let extra = rng.gen_range(3..6);
        for i in 0..extra {
            let id = format!("a{}", i + 2);
            let opp = rng.gen_bool(0.3);
            let marked_as_opp = opp != rng.gen_bool(noise);
            let opener = if marked_as_opp { OPP_OPENERS } else { PRO_OPENERS }.choose(&mut rng).unwrap();
            let mut tokens = opener.to_vec();
            tokens.extend_from_slice(BODY.choose(&mut rng).unwrap());
            tokens.push((".", ".", "PUNCT", "_"));
            let edge_id = format!("c{}", i + 1);
            if opp {
                edges.push((edge_id, id.clone(), "a1".to_string(), "reb"));
            } else {
                // supports attach to the claim or to an earlier pro ADU
                let targets: Vec<&Adu> = adus.iter().filter(|a| a.kind == "pro").collect();
                let trg = targets.choose(&mut rng).unwrap().id.clone();
                edges.push((edge_id, id.clone(), trg, "sup"));
            }
            adus.push(Adu {
                id,
                tokens,
                kind: if opp { "opp" } else { "pro" },
            });
        }
        out.push(MicroText {
            id: format!("micro_s{t:03}"),
            adus,
            edges,
        });
    }
    out
}

impl MicroText {
    pub fn xml(&self) -> String {
        let mut x = format!("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<arggraph id=\"{}\" topic_id=\"synthetic\">\n", self.id);
        for (i, a) in self.adus.iter().enumerate() {
            writeln!(x, "  <edu id=\"e{}\"><![CDATA[{}]]></edu>", i + 1, a.text()).unwrap();
        }
        for a in &self.adus {
            writeln!(x, "  <adu id=\"{}\" type=\"{}\"/>", a.id, a.kind).unwrap();
        }
        for (i, a) in self.adus.iter().enumerate() {
            writeln!(x, "  <edge id=\"s{}\" src=\"e{}\" trg=\"{}\" type=\"seg\"/>", i + 1, i + 1, a.id).unwrap();
        }
        for (id, src, trg, ty) in &self.edges {
            writeln!(x, "  <edge id=\"{id}\" src=\"{src}\" trg=\"{trg}\" type=\"{ty}\"/>").unwrap();
        }
        x.push_str("</arggraph>\n");
        x
    }

    pub fn tagged(&self) -> String {
        let mut s = String::new();
        for a in &self.adus {
            writeln!(s, "# adu_id = {}:{}", self.id, a.id).unwrap();
            for (form, lemma, pos, feats) in &a.tokens {
                writeln!(s, "{form}\t{lemma}\t{pos}\t{feats}").unwrap();
            }
            s.push('\n');
        }
        s
    }
}

/// Writes `argmicro/*.xml` and `tagged.tsv` under `root`.
pub fn write_micro_corpus(root: &Path, texts: &[MicroText]) -> (PathBuf, PathBuf) {
    let dir = root.join("argmicro");
    fs::create_dir_all(&dir).unwrap();
    let mut tagged = String::new();
    for t in texts {
        fs::write(dir.join(format!("{}.xml", t.id)), t.xml()).unwrap();
        tagged.push_str(&t.tagged());
    }
    let tagged_path = root.join("tagged.tsv");
    fs::write(&tagged_path, tagged).unwrap();
    (dir, tagged_path)
}

pub const ESSAY_TXT: &str = "Нужно ли носить школьную форму?\n\n\
Школьная форма полезна для учеников. Во-первых, она дисциплинирует. \
Например, в форме дети меньше отвлекаются на одежду. \
Однако форма ограничивает самовыражение. Вчера шёл дождь.\n";

pub fn essay_ann() -> String {
    let mut ann = String::new();
    for (id, kind, needle) in [
        ("T1", "MajorClaim", "Школьная форма полезна для учеников"),
        ("T2", "Claim", "она дисциплинирует"),
        ("T3", "Premise", "в форме дети меньше отвлекаются на одежду"),
        ("T4", "Claim", "форма ограничивает самовыражение"),
    ] {
        let byte = ESSAY_TXT.find(needle).unwrap();
        let s = ESSAY_TXT[..byte].chars().count();
        let e = s + needle.chars().count();
        writeln!(ann, "{id}\t{kind} {s} {e}\t{needle}").unwrap();
    }
    ann.push_str("A1\tStance T2 For\nA2\tStance T4 Against\nR1\tsupports Arg1:T3 Arg2:T2\t\n");
    ann
}

/// `persessays/essay00N.{txt,ann}` copies of the fixture essay.
pub fn write_essays(root: &Path, n: usize) -> PathBuf {
    let dir = root.join("persessays");
    fs::create_dir_all(&dir).unwrap();
    for i in 0..n {
        fs::write(dir.join(format!("essay{i:03}.txt")), ESSAY_TXT).unwrap();
        fs::write(dir.join(format!("essay{i:03}.ann")), essay_ann()).unwrap();
    }
    dir
}

/// Two prediction files (JSONL) whose per-class correctness cross-tab is
/// `[both right, only a right, only b right, both wrong]`.
pub fn cross_tab_files(pro: [usize; 4], opp: [usize; 4]) -> (String, String) {
    let mut a = String::new();
    let mut b = String::new();
    let mut n = 0;
    for (gold, other, cells) in [("pro", "opp", pro), ("opp", "pro", opp)] {
        for (cell, (a_ok, b_ok)) in [(true, true), (true, false), (false, true), (false, false)].into_iter().enumerate() {
            for _ in 0..cells[cell] {
                let pick = |ok: bool| if ok { gold } else { other };
                let line = |pred: &str, model: &str| {
                    format!(
                        "{{\"adu_id\":\"t{}:a{n}\",\"gold\":\"{gold}\",\"pred\":\"{pred}\",\"score\":{},\"model\":\"{model}\",\"fold\":{},\"run\":0}}\n",
                        n / 7,
                        if pred == "opp" { 0.9 } else { 0.1 },
                        n % 5
                    )
                };
                a.push_str(&line(pick(a_ok), "gbt:all"));
                b.push_str(&line(pick(b_ok), "encoder"));
                n += 1;
            }
        }
    }
    (a, b)
}
