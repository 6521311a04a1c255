//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each, and
//! exits nonzero if any criterion fails.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};
use std::time::Instant;

use ragcheck_core::meta_eval::{
    agreement_rate, correlate_metric, normalize_diffs, pearson, spearman, Aspect, AspectLabels,
    PreferencePair,
};
use ragcheck_core::model::JudgmentParts;
use ragcheck_core::{
    aggregate, compute_all, Claim, ClaimSource, JudgmentSet, Metric, MetricsRecord,
};
use ragcheck_core::{RagInstance, RetrievedChunk};
use ragcheck_pipeline::lexical::LexicalChecker;
use ragcheck_pipeline::sentence::SentenceExtractor;
use ragcheck_pipeline::testing::{MockJudge, MockJudgeServer};
use ragcheck_pipeline::Pipeline;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

// ---------------------------------------------------------------------------
// judgment construction

#[derive(Debug, Clone)]
struct Raw {
    rvg: Vec<bool>,
    gvr: Vec<bool>,
    rvc: Vec<Vec<bool>>,
    gvc: Vec<Vec<bool>>,
    k: usize,
}

fn claims(source: ClaimSource, n: usize) -> Vec<Claim> {
    let prefix = match source {
        ClaimSource::Response => "r",
        ClaimSource::GroundTruth => "g",
    };
    Claim::list(source, (0..n).map(|i| format!("{prefix}{i}"))).unwrap()
}

fn build(r: &Raw) -> JudgmentSet {
    JudgmentSet::try_from(JudgmentParts {
        response_claims: claims(ClaimSource::Response, r.rvg.len()),
        gt_claims: claims(ClaimSource::GroundTruth, r.gvr.len()),
        response_vs_gt: r.rvg.clone(),
        gt_vs_response: r.gvr.clone(),
        response_vs_chunks: r.rvc.clone(),
        gt_vs_chunks: r.gvc.clone(),
        k: r.k,
    })
    .expect("well-formed judgments")
}

// ---------------------------------------------------------------------------
// brute-force oracle: counts set memberships directly from the matrices

struct Expected {
    values: [Option<f64>; 11],
}

fn frac(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn oracle(r: &Raw) -> Expected {
    let m = r.rvg.len();
    let g = r.gvr.len();
    let k = r.k;

    let relevant: Vec<usize> = (0..k).filter(|&j| (0..g).any(|i| r.gvc[i][j])).collect();
    let irrelevant: Vec<usize> = (0..k).filter(|j| !relevant.contains(j)).collect();

    let correct: Vec<usize> = (0..m).filter(|&i| r.rvg[i]).collect();
    let incorrect: Vec<usize> = (0..m).filter(|&i| !r.rvg[i]).collect();
    let in_set = |i: usize, cols: &[usize]| cols.iter().any(|&j| r.rvc[i][j]);
    let all: Vec<usize> = (0..k).collect();

    let covered = (0..g).filter(|&i| r.gvr[i]).count();
    let gt_ctx: Vec<usize> = (0..g).filter(|&i| (0..k).any(|j| r.gvc[i][j])).collect();
    let gt_ctx_used = gt_ctx.iter().filter(|&&i| r.gvr[i]).count();

    let ns1 = incorrect.iter().filter(|&&i| in_set(i, &relevant)).count();
    let ns2 = incorrect
        .iter()
        .filter(|&&i| in_set(i, &irrelevant) && !in_set(i, &relevant))
        .count();
    let hallu = incorrect.iter().filter(|&&i| !in_set(i, &all)).count();
    let sk = correct.iter().filter(|&&i| !in_set(i, &all)).count();
    let faith = (0..m).filter(|&i| in_set(i, &all)).count();

    let p = frac(correct.len(), m);
    let rec = frac(covered, g);
    let f1 = match (p, rec) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    };
    Expected {
        values: [
            p,
            rec,
            f1,
            frac(gt_ctx.len(), g),
            frac(relevant.len(), k),
            frac(gt_ctx_used, gt_ctx.len()),
            frac(ns1, m),
            frac(ns2, m),
            frac(hallu, m),
            frac(sk, m),
            frac(faith, m),
        ],
    }
}

fn matches(got: &MetricsRecord, want: &Expected) -> Option<String> {
    for (i, metric) in Metric::ALL.into_iter().enumerate() {
        let (a, b) = (got.get(metric), want.values[i]);
        let same = match (a, b) {
            (None, None) => true,
            (Some(x), Some(y)) => (x - y).abs() <= 1e-12,
            _ => false,
        };
        if !same {
            return Some(format!("{metric}: engine {a:?}, oracle {b:?}"));
        }
    }
    None
}

fn unpack(mut bits: u64, m: usize, g: usize, k: usize) -> Raw {
    let mut take = || {
        let b = bits & 1 == 1;
        bits >>= 1;
        b
    };
    let rvg = (0..m).map(|_| take()).collect();
    let gvr = (0..g).map(|_| take()).collect();
    let rvc = (0..m).map(|_| (0..k).map(|_| take()).collect()).collect();
    let gvc = (0..g).map(|_| (0..k).map(|_| take()).collect()).collect();
    Raw {
        rvg,
        gvr,
        rvc,
        gvc,
        k,
    }
}

fn exhaustive_oracle() -> Outcome {
    let start = Instant::now();
    let mut checked = 0u64;
    for m in 0..=3 {
        for g in 1..=3 {
            for k in 0..=2 {
                let bits = m + g + m * k + g * k;
                for mask in 0..(1u64 << bits) {
                    let raw = unpack(mask, m, g, k);
                    if let Some(diff) = matches(&compute_all(&build(&raw)), &oracle(&raw)) {
                        return Err(format!("M={m} G={g} k={k} mask={mask:#b}: {diff}"));
                    }
                    checked += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 60.0, "took {secs:.1}s");
    Ok(format!(
        "{checked} configurations, 0 mismatches, {secs:.1}s"
    ))
}

// ---------------------------------------------------------------------------

fn random_raw(rng: &mut StdRng) -> Raw {
    let m = rng.gen_range(0..=20);
    let g = rng.gen_range(1..=20);
    let k = rng.gen_range(0..=20);
    let density: f64 = rng.gen();
    let mut bit = || rng.gen_bool(density);
    let rvg = (0..m).map(|_| bit()).collect();
    let gvr = (0..g).map(|_| bit()).collect();
    let rvc = (0..m).map(|_| (0..k).map(|_| bit()).collect()).collect();
    let gvc = (0..g).map(|_| (0..k).map(|_| bit()).collect()).collect();
    Raw {
        rvg,
        gvr,
        rvc,
        gvc,
        k,
    }
}

fn shuffled(n: usize, rng: &mut StdRng) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

fn permute(r: &Raw, rng: &mut StdRng) -> Raw {
    let cols = shuffled(r.k, rng);
    let rrows = shuffled(r.rvg.len(), rng);
    let grows = shuffled(r.gvr.len(), rng);
    let row = |m: &[Vec<bool>], i: usize| cols.iter().map(|&j| m[i][j]).collect::<Vec<_>>();
    Raw {
        rvg: rrows.iter().map(|&i| r.rvg[i]).collect(),
        gvr: grows.iter().map(|&i| r.gvr[i]).collect(),
        rvc: rrows.iter().map(|&i| row(&r.rvc, i)).collect(),
        gvc: grows.iter().map(|&i| row(&r.gvc, i)).collect(),
        k: r.k,
    }
}

fn algebraic_invariants() -> Outcome {
    const N: usize = 10_000;
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for n in 0..N {
        let raw = random_raw(&mut rng);
        let v = compute_all(&build(&raw));
        for (metric, x) in v.iter() {
            if let Some(x) = x {
                ensure!((0.0..=1.0).contains(&x), "set {n}: {metric} = {x}");
            }
        }
        if !raw.rvg.is_empty() {
            let g = |m| v.get(m).unwrap();
            let a = g(Metric::Faithfulness) + g(Metric::Hallucination) + g(Metric::SelfKnowledge);
            let b = g(Metric::Precision)
                + g(Metric::NsRelevant)
                + g(Metric::NsIrrelevant)
                + g(Metric::Hallucination);
            worst = worst.max((a - 1.0).abs()).max((b - 1.0).abs());
            ensure!((a - 1.0).abs() <= 1e-12, "set {n}: faith+hallu+sk = {a}");
            ensure!(
                (b - 1.0).abs() <= 1e-12,
                "set {n}: prec+ns1+ns2+hallu = {b}"
            );
        }
        let p = compute_all(&build(&permute(&raw, &mut rng)));
        ensure!(p == v, "set {n}: permutation changed {v:?} to {p:?}");
    }
    Ok(format!(
        "{N} random sets, max sum deviation {worst:.1e}, permutations exact"
    ))
}

// ---------------------------------------------------------------------------

fn record_with(m: usize, correct: usize, g: usize, covered: usize) -> MetricsRecord {
    compute_all(&build(&Raw {
        rvg: (0..m).map(|i| i < correct).collect(),
        gvr: (0..g).map(|i| i < covered).collect(),
        rvc: vec![vec![]; m],
        gvc: vec![vec![]; g],
        k: 0,
    }))
}

fn aggregation_semantics() -> Outcome {
    let a = record_with(1, 1, 5, 1); // p = 1, r = 0.2
    let b = record_with(5, 1, 1, 1); // p = 0.2, r = 1
    let report = aggregate(&[a, b]).map_err(|e| e.to_string())?;
    let f1 = report.mean(Metric::F1).unwrap();
    let (p, r) = (
        report.mean(Metric::Precision).unwrap(),
        report.mean(Metric::Recall).unwrap(),
    );
    let harmonic = 2.0 * p * r / (p + r);
    ensure!((f1 - 1.0 / 3.0).abs() < 1e-12, "mean f1 = {f1}");
    ensure!(
        (harmonic - 0.6).abs() < 1e-12,
        "harmonic of means = {harmonic}"
    );
    Ok(format!(
        "mean f1 = {f1:.6}, harmonic(mean p, mean r) = {harmonic:.6}"
    ))
}

// ---------------------------------------------------------------------------
// end-to-end through the binary

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn ragcheck(args: &[&Path]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ragcheck"))
        .args(args)
        .env("JUDGE_API_KEY", "acceptance-key")
        .output()
        .expect("run ragcheck")
}

fn p(s: &str) -> &Path {
    Path::new(s)
}

fn end_to_end_determinism() -> Outcome {
    let golden_report = fs::read(fixture("golden/report.jsonl")).map_err(|e| e.to_string())?;
    let golden_judgments =
        fs::read(fixture("golden/judgments.jsonl")).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for n in ["1", "4", "16"] {
        let j = dir.path().join(format!("j{n}.jsonl"));
        let r = dir.path().join(format!("r{n}.jsonl"));
        let o = ragcheck(&[
            p("judge"),
            &fixture("golden/dataset.jsonl"),
            p("--output"),
            &j,
            p("--parallelism"),
            p(n),
        ]);
        ensure!(o.status.success(), "judge at parallelism {n}: {o:?}");
        let o = ragcheck(&[p("eval"), &j, p("--format"), p("jsonl"), p("--output"), &r]);
        ensure!(o.status.success(), "eval at parallelism {n}: {o:?}");
        ensure!(
            fs::read(&j).unwrap() == golden_judgments,
            "judgments differ at parallelism {n}"
        );
        ensure!(
            fs::read(&r).unwrap() == golden_report,
            "report differs at parallelism {n}"
        );
    }
    Ok(format!(
        "10 instances, report of {} bytes identical at parallelism 1, 4, 16",
        golden_report.len()
    ))
}

// ---------------------------------------------------------------------------

fn instance(gt: &str, response: &str, chunks: &[&str]) -> RagInstance {
    RagInstance {
        query_id: "q".into(),
        query: "q?".into(),
        gt_answer: gt.into(),
        response: response.into(),
        retrieved: chunks
            .iter()
            .enumerate()
            .map(|(i, t)| RetrievedChunk {
                doc_id: "d".into(),
                chunk_index: i as u32,
                text: t.to_string(),
            })
            .collect(),
    }
}

fn degenerate_pipelines() -> Outcome {
    let pipeline = Pipeline::new(
        std::sync::Arc::new(SentenceExtractor),
        std::sync::Arc::new(LexicalChecker),
    );
    let text =
        "Marie Curie won two Nobel prizes. She was born in Warsaw. She studied radioactivity.";
    let superset = format!("Background. {text} She died in 1934.");
    let judge = |i: &RagInstance| {
        pipeline
            .judge_instance(i)
            .map(|j| compute_all(&j))
            .map_err(|e| e.to_string())
    };

    let id = judge(&instance(
        text,
        text,
        &[&superset, "Unrelated filler text."],
    ))?;
    for m in [
        Metric::Precision,
        Metric::Recall,
        Metric::F1,
        Metric::ClaimRecall,
        Metric::Faithfulness,
        Metric::ContextUtilization,
    ] {
        ensure!(id.get(m) == Some(1.0), "identity: {m} = {:?}", id.get(m));
    }
    for m in [
        Metric::NsRelevant,
        Metric::NsIrrelevant,
        Metric::Hallucination,
        Metric::SelfKnowledge,
    ] {
        ensure!(id.get(m) == Some(0.0), "identity: {m} = {:?}", id.get(m));
    }

    let empty = judge(&instance(text, text, &[]))?;
    ensure!(
        empty.get(Metric::ClaimRecall) == Some(0.0),
        "empty retrieval: claim_recall {:?}",
        empty.get(Metric::ClaimRecall)
    );
    ensure!(
        empty.get(Metric::ContextPrecision).is_none(),
        "empty retrieval: context_precision defined"
    );
    Ok("identity: 6 quality metrics 1.0, 4 error metrics 0.0; empty retrieval: CR 0.0, CP undefined".into())
}

// ---------------------------------------------------------------------------

fn pair(id: &str, a: f64, b: f64, h: i32) -> PreferencePair {
    let scores = |v: f64| [("precision".to_string(), v)].into_iter().collect();
    PreferencePair {
        pair_id: id.into(),
        query_id: None,
        response_a: None,
        response_b: None,
        scores_a: scores(a),
        scores_b: scores(b),
        labels: AspectLabels {
            correctness: vec![h],
            completeness: vec![h],
            overall: vec![h],
        },
    }
}

fn meta_eval() -> Outcome {
    let close = |a: Option<f64>, b: f64| a.is_some_and(|a| (a - b).abs() <= 1e-9);
    let h = [2.0, 1.0, -1.0, -2.0];
    let e = [2.0, 0.5, -0.5, -2.0];
    let r = pearson(&h, &e).map_err(|e| e.to_string())?;
    ensure!(close(r, 9.0 / 85f64.sqrt()), "pearson(h, e) = {r:?}");
    ensure!(close(spearman(&h, &e).unwrap(), 1.0), "spearman(h, e)");
    ensure!(
        close(pearson(&[1., 2., 3., 4.], &[2., 1., 4., 3.]).unwrap(), 0.6),
        "pearson 0.6 case"
    );

    let tie = spearman(&[1., 2., 3.], &[10., 10., 20.]).unwrap();
    ensure!(close(tie, 1.5 / 3f64.sqrt()), "tied spearman = {tie:?}");
    ensure!(close(tie, 0.8660254037844386), "tied spearman = {tie:?}");

    // same data through the pair pipeline: d = [0.4, 0.1, -0.1, -0.4] -> e = [2, 0.5, -0.5, -2]
    let pairs = [
        pair("a", 0.1, 0.5, 2),
        pair("b", 0.5, 0.6, 1),
        pair("c", 0.6, 0.5, -1),
        pair("d", 0.9, 0.5, -2),
    ];
    let d: Vec<f64> = pairs
        .iter()
        .map(|p| p.score_diff("precision").unwrap())
        .collect();
    let normalized = normalize_diffs(&d);
    ensure!(
        normalized.iter().zip(e).all(|(x, y)| (x - y).abs() <= 1e-9),
        "normalized {normalized:?}"
    );
    let c =
        correlate_metric(&pairs, "precision", Aspect::Correctness).map_err(|e| e.to_string())?;
    ensure!(
        close(c.result.pearson, 9.0 / 85f64.sqrt()),
        "pair pearson {:?}",
        c.result.pearson
    );
    ensure!(
        close(c.result.spearman, 1.0),
        "pair spearman {:?}",
        c.result.spearman
    );

    let rate = agreement_rate(&[2, 0], &[1, 2]).unwrap();
    ensure!(rate == 0.5, "agreement_rate([2,0],[1,2]) = {rate}");
    // boundary: a difference of exactly one agrees, two does not
    ensure!(
        agreement_rate(&[-2, 2, 0], &[-1, 1, 1]).unwrap() == 1.0,
        "|h - h'| = 1 must agree"
    );
    ensure!(
        agreement_rate(&[2, -2], &[0, 0]).unwrap() == 0.0,
        "|h - h'| = 2 must disagree"
    );
    Ok(format!(
        "pearson {:.9}, spearman(ties) {:.9}, agreement 0.5",
        r.unwrap(),
        tie.unwrap()
    ))
}

// ---------------------------------------------------------------------------
// remote judge via an HTTP mock

fn write_config(dir: &Path, url: &str, extractor: &str, cache: Option<&Path>) -> PathBuf {
    let mut text = format!(
        "[extractor]\nkind = \"{extractor}\"\n\n[checker]\nkind = \"remote_judge\"\n\n\
         [judge]\nurl = \"{url}\"\nmodel = \"mock-judge\"\n\n[retry]\nbase_delay_ms = 1\n\n[run]\nparallelism = 4\n"
    );
    if let Some(c) = cache {
        text.push_str(&format!("cache_dir = {:?}\n", c.to_str().unwrap()));
    }
    let path = dir.join(format!("{extractor}.toml"));
    fs::write(&path, text).unwrap();
    path
}

fn dataset_ks(path: &Path) -> Vec<(String, usize)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            (
                v["query_id"].as_str().unwrap().to_string(),
                v["retrieved_context"].as_array().unwrap().len(),
            )
        })
        .collect()
}

fn cache_and_cost() -> Outcome {
    let data = fixture("cost_dataset.jsonl");
    let ks = dataset_ks(&data);
    let expected_checks: usize = ks.iter().map(|(_, k)| 2 + 2 * k).sum();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cache = dir.path().join("cache");

    // cold, whole batch
    let server = MockJudgeServer::start(MockJudge::new());
    let cfg = write_config(dir.path(), server.url(), "sentence", Some(&cache));
    let cold = dir.path().join("cold.jsonl");
    let o = ragcheck(&[p("judge"), &data, p("--config"), &cfg, p("--output"), &cold]);
    ensure!(o.status.success(), "cold run: {o:?}");
    let c = &server.judge.counters;
    ensure!(
        c.check_requests() == expected_checks && c.requests() == expected_checks,
        "cold run: {} check requests ({} total), expected {expected_checks}",
        c.check_requests(),
        c.requests()
    );
    ensure!(
        server.last_authorization().as_deref() == Some("Bearer acceptance-key"),
        "authorization header {:?}",
        server.last_authorization()
    );
    drop(server);

    // cold, one instance at a time: exactly 2 + 2k each
    let server = MockJudgeServer::start(MockJudge::new());
    let cfg_nocache = {
        let sub = dir.path().join("nocache");
        fs::create_dir_all(&sub).unwrap();
        write_config(&sub, server.url(), "sentence", None)
    };
    let lines: Vec<String> = fs::read_to_string(&data)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    for ((qid, k), line) in ks.iter().zip(&lines) {
        let single = dir.path().join(format!("{qid}.jsonl"));
        fs::write(&single, format!("{line}\n")).unwrap();
        let before = server.judge.counters.check_requests();
        let o = ragcheck(&[
            p("judge"),
            &single,
            p("--config"),
            &cfg_nocache,
            p("--output"),
            &dir.path().join("x.jsonl"),
        ]);
        ensure!(o.status.success(), "{qid}: {o:?}");
        let n = server.judge.counters.check_requests() - before;
        ensure!(n == 2 + 2 * k, "{qid}: {n} requests for k = {k}");
    }
    drop(server);

    // warm: fresh mock, same cache
    let server = MockJudgeServer::start(MockJudge::new());
    let cfg = write_config(dir.path(), server.url(), "sentence", Some(&cache));
    let warm = dir.path().join("warm.jsonl");
    let o = ragcheck(&[p("judge"), &data, p("--config"), &cfg, p("--output"), &warm]);
    ensure!(o.status.success(), "warm run: {o:?}");
    ensure!(
        server.judge.counters.requests() == 0,
        "warm run made {} calls",
        server.judge.counters.requests()
    );
    ensure!(
        fs::read(&cold).unwrap() == fs::read(&warm).unwrap(),
        "warm output differs"
    );
    drop(server);

    // remote extraction adds the two extraction calls
    let server = MockJudgeServer::start(MockJudge::new());
    let cfg = write_config(dir.path(), server.url(), "remote_judge", None);
    let remote = dir.path().join("remote.jsonl");
    let o = ragcheck(&[
        p("judge"),
        &data,
        p("--config"),
        &cfg,
        p("--output"),
        &remote,
    ]);
    ensure!(o.status.success(), "remote extraction run: {o:?}");
    let c = &server.judge.counters;
    ensure!(
        c.check_requests() == expected_checks && c.extract_requests() == 2 * ks.len(),
        "remote extraction: {} checks, {} extractions",
        c.check_requests(),
        c.extract_requests()
    );
    ensure!(
        fs::read(&cold).unwrap() == fs::read(&remote).unwrap(),
        "remote extraction changed judgments"
    );

    Ok(format!(
        "cold {expected_checks} check requests for {} instances (2 + 2k each), warm 0 calls, identical bytes",
        ks.len()
    ))
}

fn resilience() -> Outcome {
    let data = fixture("cost_dataset.jsonl");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;

    let local = dir.path().join("local.jsonl");
    let o = ragcheck(&[p("judge"), &data, p("--output"), &local]);
    ensure!(o.status.success(), "local run: {o:?}");
    let local_lines: Vec<String> = fs::read_to_string(&local)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();

    let server = MockJudgeServer::start(
        MockJudge::new()
            .with_failure_rate(0.3, 2024)
            .with_malformed_marker("Noise 7"),
    );
    let cfg = write_config(dir.path(), server.url(), "remote_judge", None);
    let out = dir.path().join("flaky.jsonl");
    let o = ragcheck(&[p("judge"), &data, p("--config"), &cfg, p("--output"), &out]);
    ensure!(
        o.status.code() == Some(1),
        "exit {:?}: {}",
        o.status.code(),
        String::from_utf8_lossy(&o.stderr)
    );

    let got: Vec<String> = fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    let want: Vec<&String> = local_lines
        .iter()
        .filter(|l| !l.contains("\"c7\""))
        .collect();
    ensure!(got.len() == 9, "{} judged instances, expected 9", got.len());
    ensure!(
        got.iter().zip(&want).all(|(a, b)| a == *b),
        "judgments differ from local backends"
    );

    let sidecar = fs::read_to_string(dir.path().join("flaky.jsonl.errors.jsonl")).unwrap();
    let failed: Vec<serde_json::Value> = sidecar
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    ensure!(
        failed.len() == 1 && failed[0]["query_id"] == "c7",
        "sidecar: {sidecar}"
    );

    let c = &server.judge.counters;
    ensure!(c.injected_failures() > 0, "no failures injected");
    Ok(format!(
        "{} of {} calls failed with 503, 0 transient losses; malformed c7 isolated in sidecar",
        c.injected_failures(),
        c.requests()
    ))
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 exhaustive oracle equivalence", exhaustive_oracle),
        (
            "2 algebraic invariants on random sets",
            algebraic_invariants,
        ),
        ("3 per-query aggregation", aggregation_semantics),
        ("4 end-to-end golden determinism", end_to_end_determinism),
        (
            "5 identity and empty-retrieval pipelines",
            degenerate_pipelines,
        ),
        ("6 meta-evaluation values", meta_eval),
        ("7 cache soundness and request cost", cache_and_cost),
        ("8 remote judge resilience", resilience),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
