//! Helpers shared by the integration tests: fixture paths, a pipeline runner
//! that drives the binary, and a serial brute-force oracle that re-derives
//! the headline numbers from the raw fixture files without the library.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures().join(name)
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Run the binary inside the fixture directory with the given worker count.
pub fn biasaudit(args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_biasaudit"));
    cmd.current_dir(fixtures())
        .args(args)
        .env_remove("BIASAUDIT_THREADS")
        .env("RUST_LOG", "error");
    if let Some(n) = threads {
        cmd.env("BIASAUDIT_THREADS", n.to_string());
    }
    cmd.output().expect("binary runs")
}

pub fn ok(args: &[&str], threads: Option<usize>) {
    let out = biasaudit(args, threads);
    assert!(
        out.status.success(),
        "biasaudit {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Every subcommand over the fixture, writing into `out`.
pub fn run_pipeline(out: &Path, threads: Option<usize>) {
    let o = out.to_str().unwrap();
    let human = out.join("human");
    let h = human.to_str().unwrap();
    let filtered = out.join("filtered");
    let f = filtered.to_str().unwrap();
    let common = [
        "--captions",
        "captions.jsonl",
        "--contexts",
        "contexts.jsonl",
        "--sidecar-emb",
        "sidecar_emb.jsonl",
        "--sidecar-lm",
        "sidecar_lm.jsonl",
    ];
    let with = |head: &[&'static str], tail: &[&str]| -> Vec<String> {
        head.iter()
            .map(|s| s.to_string())
            .chain(tail.iter().map(|s| s.to_string()))
            .collect()
    };
    let runs: Vec<Vec<String>> = vec![
        with(
            &[
                "validate",
                "--captions",
                "captions.jsonl",
                "--contexts",
                "contexts.jsonl",
                "--vectors",
                "vectors.txt",
            ],
            &[
                "--sidecar-emb",
                "sidecar_emb.jsonl",
                "--sidecar-lm",
                "sidecar_lm.jsonl",
                "--text",
                "text.jsonl",
                "--include-neutral",
                "--out",
                o,
            ],
        ),
        with(
            &[
                "filter-context",
                "--contexts",
                "contexts_raw.jsonl",
                "--vectors",
                "vectors.txt",
                "--out",
            ],
            &[f],
        ),
        with(
            &[
                "distance",
                "--level",
                "word",
                "--vectors",
                "vectors.txt",
                "--captions",
                "captions.jsonl",
            ],
            &["--contexts", "contexts.jsonl", "--out", o],
        ),
        with(
            &[
                "distance",
                "--level",
                "sentence",
                "--sidecar",
                "sidecar_emb.jsonl",
                "--captions",
                "captions.jsonl",
            ],
            &["--contexts", "contexts.jsonl", "--out", o],
        ),
        with(
            &["score"],
            &[&common[..], &["--source", "model", "--out", o]].concat(),
        ),
        with(
            &["estimate"],
            &[
                &common[..],
                &[
                    "--include-neutral",
                    "--compare",
                    "external_predictions.jsonl",
                    "--out",
                    o,
                ],
            ]
            .concat(),
        ),
        with(
            &[
                "cooc",
                "--captions",
                "captions.jsonl",
                "--source",
                "model",
                "--contexts",
                "contexts.jsonl",
            ],
            &["--scored", &format!("{o}/scored.jsonl"), "--out", o],
        ),
        with(
            &[
                "cooc",
                "--captions",
                "captions.jsonl",
                "--source",
                "human",
                "--out",
            ],
            &[h],
        ),
        with(
            &["leakage"],
            &[
                "--model",
                &format!("{o}/cooc_summary.json"),
                "--human",
                &format!("{h}/cooc_summary.json"),
                "--out",
                o,
            ],
        ),
        with(
            &[
                "text-score",
                "--records",
                "text.jsonl",
                "--sidecar-emb",
                "sidecar_emb.jsonl",
                "--sidecar-lm",
                "sidecar_lm.jsonl",
                "--out",
            ],
            &[o],
        ),
        with(&["report", "--label", "fixture", "--run"], &[o]),
    ];
    for args in runs {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        ok(&refs, threads);
    }
}

/// Relative path to contents for every file under `dir`.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p
                    .strip_prefix(dir)
                    .unwrap()
                    .to_string_lossy()
                    .replace('\\', "/");
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

// ---- brute-force oracle -------------------------------------------------

pub struct Lex {
    pub man: BTreeSet<String>,
    pub woman: BTreeSet<String>,
    pub neutral: BTreeSet<String>,
    pub anchors: [String; 3],
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum G {
    M,
    W,
    N,
    Mixed,
}

pub struct Cap {
    pub id: String,
    pub image: String,
    pub text: String,
    pub source: String,
}

impl Cap {
    pub fn masked(&self) -> bool {
        self.text.contains("<MASK>")
    }
}

pub struct Data {
    pub lex: Lex,
    pub caps: Vec<Cap>,
    pub ctx: HashMap<String, Vec<(String, f64)>>,
    pub words: HashMap<String, Vec<f64>>,
    pub emb: HashMap<String, Vec<f64>>,
    pub lm: HashMap<String, f64>,
}

fn jsonl(name: &str) -> Vec<Value> {
    std::fs::read_to_string(fixture(name))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str::<Value>(l).unwrap())
        .filter(|v| v.get("_manifest").is_none())
        .collect()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

pub fn load() -> Data {
    let lexv: Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("lexicon.json")).unwrap()).unwrap();
    let set = |k: &str| -> BTreeSet<String> {
        lexv[k]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s.as_str().unwrap().to_string())
            .collect()
    };
    let anchor = |k: &str| lexv["anchors"][k].as_str().unwrap().to_string();
    let lex = Lex {
        man: set("man"),
        woman: set("woman"),
        neutral: set("neutral"),
        anchors: [anchor("man"), anchor("woman"), anchor("neutral")],
    };
    let caps = jsonl("captions.jsonl")
        .into_iter()
        .map(|v| Cap {
            id: v["id"].as_str().unwrap().into(),
            image: v["image_id"].as_str().unwrap().into(),
            text: v["text"].as_str().unwrap().into(),
            source: v["source"].as_str().unwrap().into(),
        })
        .collect();
    let ctx = jsonl("contexts.jsonl")
        .into_iter()
        .map(|v| {
            let objs = v["objects"]
                .as_array()
                .unwrap()
                .iter()
                .map(|o| {
                    (
                        o["label"].as_str().unwrap().to_string(),
                        o["confidence"].as_f64().unwrap(),
                    )
                })
                .collect();
            (v["image_id"].as_str().unwrap().to_string(), objs)
        })
        .collect();
    let words = std::fs::read_to_string(fixture("vectors.txt"))
        .unwrap()
        .lines()
        .map(|l| {
            let mut it = l.split_whitespace();
            let w = it.next().unwrap().to_string();
            (w, it.map(|x| x.parse::<f64>().unwrap()).collect())
        })
        .collect();
    let emb = jsonl("sidecar_emb.jsonl")
        .into_iter()
        .map(|v| (v["key"].as_str().unwrap().to_string(), floats(&v["vector"])))
        .collect();
    let lm = jsonl("sidecar_lm.jsonl")
        .into_iter()
        .map(|v| {
            let p = match v.get("mean_token_prob") {
                Some(p) => p.as_f64().unwrap(),
                None => {
                    let lps = floats(&v["token_logprobs"]);
                    lps.iter().map(|x| x.exp()).sum::<f64>() / lps.len() as f64
                }
            };
            (v["key"].as_str().unwrap().to_string(), p.max(1e-12))
        })
        .collect();
    Data {
        lex,
        caps,
        ctx,
        words,
        emb,
        lm,
    }
}

pub fn tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            cur.extend(ch.to_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

pub fn gender(lex: &Lex, text: &str) -> G {
    let t = tokens(text);
    let m = t.iter().any(|w| lex.man.contains(w));
    let w = t.iter().any(|x| lex.woman.contains(x));
    match (m, w) {
        (true, true) => G::Mixed,
        (true, false) => G::M,
        (false, true) => G::W,
        _ => G::N,
    }
}

/// (man, woman, neutral, mixed) over unmasked captions of `source` (or all).
pub fn cooc(d: &Data, source: Option<&str>) -> [usize; 4] {
    let mut c = [0; 4];
    for cap in &d.caps {
        if cap.masked() || source.is_some_and(|s| s != cap.source) {
            continue;
        }
        c[match gender(&d.lex, &cap.text) {
            G::M => 0,
            G::W => 1,
            G::N => 2,
            G::Mixed => 3,
        }] += 1;
    }
    c
}

fn cos(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

fn phrase(words: &HashMap<String, Vec<f64>>, label: &str) -> Option<Vec<f64>> {
    if let Some(v) = words
        .get(label)
        .or_else(|| words.get(&label.to_lowercase()))
    {
        return Some(v.clone());
    }
    let hits: Vec<&Vec<f64>> = tokens(label).iter().filter_map(|t| words.get(t)).collect();
    if hits.is_empty() {
        return None;
    }
    let dim = hits[0].len();
    Some(
        (0..dim)
            .map(|i| hits.iter().map(|v| v[i]).sum::<f64>() / hits.len() as f64)
            .collect(),
    )
}

/// Corpus means (person, man, woman) and counts at the word level.
pub fn distance_word(d: &Data) -> ([f64; 3], [usize; 3]) {
    let mut sum = [0.0; 3];
    let mut n = [0; 3];
    let term = [&d.words["person"], &d.words["man"], &d.words["woman"]];
    for cap in d.caps.iter().filter(|c| !c.masked()) {
        let g = gender(&d.lex, &cap.text);
        if g == G::Mixed {
            continue;
        }
        for (label, _) in d.ctx.get(&cap.image).map(Vec::as_slice).unwrap_or(&[]) {
            let v = phrase(&d.words, label).unwrap();
            let mut cols = vec![0];
            match g {
                G::M => cols.push(1),
                G::W => cols.push(2),
                _ => {}
            }
            for c in cols {
                sum[c] += cos(term[c], &v).max(0.0);
                n[c] += 1;
            }
        }
    }
    (
        [
            sum[0] / n[0] as f64,
            sum[1] / n[1] as f64,
            sum[2] / n[2] as f64,
        ],
        n,
    )
}

/// Corpus means (person, man, woman) and counts at the sentence level.
pub fn distance_sentence(d: &Data) -> ([f64; 3], [usize; 3]) {
    let mut sum = [0.0; 3];
    let mut n = [0; 3];
    let anchors: Vec<&Vec<f64>> = d.lex.anchors.iter().map(|a| &d.emb[a]).collect();
    let [a_man, a_woman, a_person] = [anchors[0], anchors[1], anchors[2]];
    for cap in d.caps.iter().filter(|c| !c.masked()) {
        let g = gender(&d.lex, &cap.text);
        if g == G::Mixed {
            continue;
        }
        let v = &d.emb[&cap.id];
        sum[0] += cos(a_person, v).max(0.0);
        n[0] += 1;
        match g {
            G::M => {
                sum[1] += cos(a_man, v).max(0.0);
                n[1] += 1;
            }
            G::W => {
                sum[2] += cos(a_woman, v).max(0.0);
                n[2] += 1;
            }
            _ => {}
        }
    }
    (
        [
            sum[0] / n[0] as f64,
            sum[1] / n[1] as f64,
            sum[2] / n[2] as f64,
        ],
        n,
    )
}

/// Max-sim revised score of sidecar key `key` for an image, via direct `powf`.
pub fn revised(d: &Data, key: &str, image: &str) -> f64 {
    let p = d.lm[key];
    let objs = d.ctx.get(image).map(Vec::as_slice).unwrap_or(&[]);
    if objs.is_empty() {
        return p;
    }
    let v = &d.emb[key];
    let mut best: Option<(f64, f64)> = None;
    for (label, conf) in objs {
        let s = cos(v, &d.emb[label]).clamp(0.0, 1.0);
        if best.is_none_or(|(bs, _)| s > bs) {
            best = Some((s, *conf));
        }
    }
    let (s, c) = best.unwrap();
    let alpha = ((1.0 - s) / (1.0 + s)).powf(1.0 - c);
    p.powf(alpha)
}

/// Mean revised score per class (man, woman, person) over captions of `source`,
/// with the masked fills scored under both genders (and person when asked).
pub fn gender_scores(
    d: &Data,
    source: Option<&str>,
    include_neutral: bool,
) -> ([Option<f64>; 3], [usize; 3]) {
    let mut sum = [0.0; 3];
    let mut n = [0; 3];
    for cap in &d.caps {
        if source.is_some_and(|s| s != cap.source) {
            continue;
        }
        let mut push = |slot: usize, key: &str| {
            sum[slot] += revised(d, key, &cap.image);
            n[slot] += 1;
        };
        if cap.masked() {
            push(0, &format!("{}#man", cap.id));
            push(1, &format!("{}#woman", cap.id));
            if include_neutral {
                push(2, &format!("{}#person", cap.id));
            }
        } else {
            match gender(&d.lex, &cap.text) {
                G::M => push(0, &cap.id),
                G::W => push(1, &cap.id),
                G::N => push(2, &cap.id),
                G::Mixed => {}
            }
        }
    }
    let mean = |i: usize| (n[i] > 0).then(|| sum[i] / n[i] as f64);
    ([mean(0), mean(1), mean(2)], n)
}

/// (man, woman, neutral) predictions over masked captions.
pub fn estimate(d: &Data) -> [usize; 3] {
    let mut c = [0; 3];
    for cap in d.caps.iter().filter(|c| c.masked()) {
        let m = revised(d, &format!("{}#man", cap.id), &cap.image);
        let w = revised(d, &format!("{}#woman", cap.id), &cap.image);
        let i = if (m - w).abs() <= 1e-9 {
            2
        } else if m > w {
            0
        } else {
            1
        };
        c[i] += 1;
    }
    c
}
