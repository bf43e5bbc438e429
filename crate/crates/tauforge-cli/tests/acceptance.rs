//! End-to-end acceptance run: one line per criterion, in order.
//!
//! Runs without the libtest harness so the lines come out in sequence.
//! Criteria that fail for documented reasons (see README, "Known
//! failures") are reported as FAIL and do not fail the target; any other
//! FAIL does.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use tauforge::channel::{ChannelSeries, ChannelSpec, DiffRing};
use tauforge::field::{q, Field, QuadExt, Q};
use tauforge::linalg::determinant;
use tauforge::nekrasov::*;
use tauforge::partition::partitions;
use tauforge::pit::PointSampler;
use tauforge::scalar::{ParameterPoint, Sym};
use tauforge::skew::*;
use tauforge::tau::*;
use tauforge::verma::gram_matrix;
use tauforge::whittaker::{icb_series, irregular_vertex, rank1_relation_defect};

const KNOWN_FAILURES: [u32; 2] = [1, 4];
const FOUR: [Sym; 5] = [Sym::Theta0, Sym::ThetaT, Sym::Sigma, Sym::Theta1, Sym::ThetaInf];
const IRREGULAR: [Sym; 4] = [Sym::Theta, Sym::Theta0, Sym::ThetaT, Sym::Beta];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn qv(p: &ParameterPoint, s: Sym) -> Q {
    p.q(s).unwrap()
}

fn i(n: i64) -> Q {
    Q::from(n)
}

fn agt_dressing() -> Verdict {
    let mut s = PointSampler::new(&FOUR, 101);
    let points: Vec<_> = (0..5).map(|_| s.point()).collect();
    let mut printed = Vec::new();
    let mut swapped = 0;
    for p in &points {
        printed.push(agt_equivalence_check(p, 6, Dressing::Theta0Theta1).unwrap().first_mismatch);
        swapped += agt_equivalence_check(p, 6, Dressing::ThetaTTheta1).unwrap().pass as usize;
    }
    let pass = printed.iter().all(Option::is_none);
    verdict(
        pass,
        format!(
            "(1-t)^(2θ0θ1): first mismatch per point {:?}; (1-t)^(2θtθ1): equal through t^6 at {}/5 points",
            printed.iter().map(|m| m.map_or("none".into(), |k| format!("t^{}", k))).collect::<Vec<String>>(),
            swapped
        ),
    )
}

fn hypergeometric() -> Verdict {
    let mut s = PointSampler::new(&[Sym::Theta0, Sym::Theta1, Sym::ThetaInf], 102);
    let (mut ok, mut tried, mut skipped) = (0, 0, 0);
    while tried < 3 {
        let r = s.point();
        let (t0, t1, ti) = (qv(&r, Sym::Theta0), qv(&r, Sym::Theta1), qv(&r, Sym::ThetaInf));
        let p = ParameterPoint::new()
            .with(Sym::Theta0, t0.clone())
            .with(Sym::ThetaT, q(1, 2))
            .with(Sym::Sigma, &t0 + q(1, 2))
            .with(Sym::Theta1, t1.clone())
            .with(Sym::ThetaInf, ti.clone());
        // the slice makes 2σ = 2θ0 + 1, so integer-spaced θ0 are poles
        let Ok(sum) = block_sum_at(NekrasovKind::Full4, &p, 8) else {
            skipped += 1;
            continue;
        };
        tried += 1;
        let (mut fact, mut prod) = (Q::ONE, Q::ONE);
        let mut good = sum[0] == Q::ONE;
        for n in 1..=8 {
            fact *= i(n);
            let x = &t1 + &t0 + i(n) - q(1, 2);
            prod *= (x.square() - ti.square()) / (i(2) * &t0 + i(n));
            good &= sum[n as usize] == &prod / &fact;
        }
        ok += good as usize;
    }
    verdict(ok == 3, format!("n ≤ 8 exact at {}/3 points ({} non-generic samples skipped)", ok, skipped))
}

fn pvi_first_coefficient() -> Verdict {
    let points = generic_points(Family::PVI, 5, 103);
    let ok = points
        .iter()
        .filter(|p| {
            let tau = tau_series::<Q>(Family::PVI, p, 0, 1, StructureMode::Reduced).unwrap();
            let (t0, tt, t1, ti, s) = (qv(p, Sym::Theta0), qv(p, Sym::ThetaT), qv(p, Sym::Theta1), qv(p, Sym::ThetaInf), qv(p, Sym::Sigma));
            let expect = (t0.square() - tt.square() - s.square()) * (ti.square() - t1.square() - s.square()) / (i(2) * s.square());
            tau.series.get(0, 0) == Q::ONE && tau.series.get(0, 1) == expect
        })
        .count();
    verdict(ok == 5, format!("channel-0 t^1 coefficient exact at {}/5 points", ok))
}

fn ladder() -> Verdict {
    let p = PointSampler::new(&[Sym::Theta0, Sym::ThetaT, Sym::Sigma, Sym::ThetaStar, Sym::ThetaSStar], 104).point();
    let lams = [i(100), i(1000), i(10000)];
    let mut parts = Vec::new();
    let mut pass = true;
    for (a, b) in EDGES {
        let r = degeneration_limit_check(a, b, &p, &lams, 3).unwrap();
        let ok = r.within(3, 8.0, 12.0);
        pass &= ok;
        let ks: Vec<f64> = r.ratios.iter().flat_map(|x| x[1..=3].iter().copied()).filter(|v| v.is_finite()).collect();
        let lo = ks.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let k1_exact = r.deviation.iter().all(|d| d[1] == 0.0);
        parts.push(format!(
            "{}→{} {} [{:.2},{:.2}]{}",
            a.name(),
            b.name(),
            if ok { "ok" } else { "out" },
            lo,
            hi,
            if k1_exact { " (k=1 exact)" } else { "" }
        ));
    }
    verdict(pass, format!("ratio ranges over k=1..3: {}", parts.join("; ")))
}

fn printed_a1(th: &Q, t0: &Q, tt: &Q, b: &Q) -> Q {
    i(2) * (i(2) * b.pow(3) - i(3) * b.square() * th + b * th.square() - b * t0.square() - b * tt.square() + th * tt.square())
}

fn printed_a2(th: &Q, t0: &Q, tt: &Q, b: &Q) -> Q {
    let (t02, tt2) = (t0.square(), tt.square());
    let s = i(4) * b.pow(6) - i(12) * b.pow(5) * th + i(13) * b.pow(4) * th.square() - i(4) * b.pow(4) * &t02
        - i(4) * b.pow(4) * &tt2
        + i(5) * b.pow(4)
        - i(6) * b.pow(3) * th.pow(3)
        + i(6) * b.pow(3) * th * &t02
        + i(10) * b.pow(3) * th * &tt2
        - i(10) * b.pow(3) * th
        + b.square() * th.pow(4)
        - i(2) * b.square() * th.square() * &t02
        - i(8) * b.square() * th.square() * &tt2
        + i(6) * b.square() * th.square()
        + b.square() * t02.square()
        + i(2) * b.square() * &t02 * &tt2
        - i(3) * b.square() * &t02
        + b.square() * tt2.square()
        - i(3) * b.square() * &tt2
        + i(2) * b * th.pow(3) * &tt2
        - b * th.pow(3)
        - i(2) * b * th * &t02 * &tt2
        + b * th * &t02
        - i(2) * b * th * tt2.square()
        + i(5) * b * th * &tt2
        + th.square() * tt2.square()
        - i(2) * th.square() * &tt2
        + &t02 * &tt2;
    i(2) * s
}

fn icb_rank_one() -> Verdict {
    let mut s = PointSampler::new(&IRREGULAR, 105);
    let mut ok = 0;
    for _ in 0..10 {
        let p = s.point();
        let (th, t0, tt, b) = (qv(&p, Sym::Theta), qv(&p, Sym::Theta0), qv(&p, Sym::ThetaT), qv(&p, Sym::Beta));
        let r = icb_series(1, &t0.square(), &tt.square(), &[th.clone(), q(1, 4)], &b, false, 2).unwrap();
        let good = r.coeffs[1] == QuadExt::from_q(&printed_a1(&th, &t0, &tt, &b))
            && r.coeffs[2] == QuadExt::from_q(&printed_a2(&th, &t0, &tt, &b));
        ok += good as usize;
    }
    verdict(ok == 10, format!("a1 and a2 exact at {}/10 points", ok))
}

fn icb_rank_two() -> Verdict {
    let mut s = PointSampler::new(&IRREGULAR, 106);
    let (mut ok, mut odd_zero) = (0, 0);
    for _ in 0..5 {
        let p = s.point();
        let (th, tt, b) = (qv(&p, Sym::Theta), qv(&p, Sym::ThetaT), qv(&p, Sym::Beta));
        let r = icb_series(2, &Q::ZERO, &tt.square(), &[th.clone(), Q::ZERO, q(1, 4)], &(&b / i(2)), false, 7).unwrap();
        let tt2 = tt.square();
        let a2 = th.square() * &b + i(2) * &th * &tt2 - i(6) * &th * b.square() - i(3) * &tt2 * &b + i(6) * b.pow(3);
        let a4 = (i(2) * th.pow(4) * b.square() + i(8) * th.pow(3) * &tt2 * &b - i(24) * th.pow(3) * b.pow(3)
            - i(4) * th.pow(3) * &b
            + i(8) * th.square() * tt2.square()
            - i(60) * th.square() * &tt2 * b.square()
            - i(16) * th.square() * &tt2
            + i(96) * th.square() * b.pow(4)
            + i(48) * th.square() * b.square()
            - i(24) * &th * tt2.square() * &b
            + i(120) * &th * &tt2 * b.pow(3)
            + i(72) * &th * &tt2 * &b
            - i(144) * &th * b.pow(5)
            - i(140) * &th * b.pow(3)
            - i(2) * &th * &b
            + i(18) * tt2.square() * b.square()
            + tt2.square()
            - i(72) * &tt2 * b.pow(4)
            - i(66) * &tt2 * b.square()
            - &tt2
            + i(72) * b.pow(6)
            + i(105) * b.pow(4)
            + i(3) * b.square())
            / i(4);
        ok += (r.coeffs[2] == QuadExt::from_q(&a2) && r.coeffs[4] == QuadExt::from_q(&a4)) as usize;
        odd_zero += [1, 3, 5, 7].iter().all(|&k| r.coeffs[k].is_zero()) as usize;
    }
    verdict(ok == 5 && odd_zero == 5, format!("t^-2, t^-4 exact at {}/5; odd orders through t^-7 vanish at {}/5", ok, odd_zero))
}

fn exact_window<F: TauScalar>(family: Family, order: u32, seed: u64) -> Verdict {
    let mut ok = 0;
    let mut cells = 0;
    for p in generic_points(family, 3, seed) {
        let tau = tau_series::<F>(family, &p, 1, order, StructureMode::Reduced).unwrap();
        let rep = ode_residual(&tau, &p).unwrap();
        let ch0 = rep.channel_cells(0);
        cells += rep.trusted.len();
        ok += (ch0.contains(&-6) && ch0.iter().all(|&k| rep.value(0, k).is_zero()) && rep.exact_zero()) as usize;
    }
    verdict(ok == 3, format!("s^0 window through t^-6 (and all {} trusted cells, N_max=1, M={}) exactly zero at {}/3 points", cells, order, ok))
}

fn numeric(family: Family, order: u32, seed: u64) -> Verdict {
    let mut worst_abs = f64::NEG_INFINITY;
    let mut worst_rel = f64::NEG_INFINITY;
    let mut working = 0;
    let mut ok = 0;
    for p in generic_points(family, 3, seed) {
        let c = numeric_check(family, &p, 1, order, 60).unwrap();
        ok += c.abs_below(-40.0) as usize;
        worst_abs = worst_abs.max(c.max_abs_log10.unwrap_or(f64::NEG_INFINITY));
        worst_rel = worst_rel.max(c.max_rel_log10.unwrap_or(f64::NEG_INFINITY));
        working = working.max(c.working_digits);
    }
    verdict(
        ok == 3,
        format!(
            "60 digits, N_max=1, M={}: max log10|R| = {:.1}, max relative = {:.1} ({}/3 points below 1e-40; up to {} working digits)",
            order, worst_abs, worst_rel, ok, working
        ),
    )
}

fn both(a: Verdict, b: Verdict) -> Verdict {
    verdict(a.pass && b.pass, format!("exact: {} | numeric: {}", a.detail, b.detail))
}

fn written_table(k: u32) -> Option<Vec<(SkewTerm, Q)>> {
    skew_terms(k)
        .into_iter()
        .map(|t| {
            let c = match (t.nu.parts(), t.eta.parts()) {
                ([], []) => 1,
                ([1], [1]) => match (k, t.lambda.size()) {
                    (2, _) => 2,
                    (3, _) => 4,
                    (4, 2) => 8,
                    (4, _) => 6,
                    _ => return None,
                },
                ([2], [2]) | ([1, 1], [1, 1]) => 4,
                ([2], [1, 1]) | ([1, 1], [2]) => 12,
                _ => return None,
            };
            Some((t, i(c)))
        })
        .collect()
}

fn skew_conjecture() -> Verdict {
    let sols: Vec<CSolution> = (1..=5).map(|k| solve_c(k, 20, 107).unwrap()).collect();
    let unique = sols.iter().all(|s| s.nullity() == 0);
    let mut written_ok = true;
    let mut sampler = PointSampler::new(&IRREGULAR, 108);
    for k in 1..=4 {
        let table = written_table(k).expect("written constants cover orders 1-4");
        written_ok &= table.iter().all(|(t, c)| sols[k as usize - 1].determined(t).as_ref() == Some(c));
        let map = table.into_iter().collect();
        for _ in 0..3 {
            let sp = SkewPoint::from_point(&sampler.point()).unwrap();
            written_ok &= expansion_value(k, &map, &sp) == block_coefficient(&sp, k).unwrap();
        }
    }
    let rep = verify_observed(&sols);
    let unknowns: Vec<usize> = sols.iter().map(|s| s.terms.len()).collect();
    verdict(
        unique && written_ok && rep.pass() && rep.undetermined.is_empty(),
        format!(
            "unknowns {:?}, all determined: {}; written t^-1..t^-4 constants: {}; {} entries non-negative integers: {}; family matches {} (mismatches {}); symmetry violations {}",
            unknowns,
            unique,
            if written_ok { "reproduced" } else { "MISMATCH" },
            rep.determined,
            rep.non_integral.is_empty(),
            rep.matches,
            rep.mismatches.len(),
            rep.symmetry_violations.len()
        ),
    )
}

fn gram_suite() -> bool {
    let mut s = PointSampler::new(&[Sym::Delta, Sym::C], 109);
    (0..5).all(|_| {
        let p = s.point();
        let (d, c) = (qv(&p, Sym::Delta), qv(&p, Sym::C));
        let symmetric = (1..=4).all(|m| {
            let g = gram_matrix(&d, &c, m);
            (0..g.len()).all(|a| (0..g.len()).all(|b| g[a][b] == g[b][a]))
        });
        let kac2 = i(2) * &d * (i(16) * d.square() + i(2) * (&c - i(5)) * &d + &c);
        symmetric && determinant(&gram_matrix(&d, &c, 1)) == i(2) * &d && determinant(&gram_matrix(&d, &c, 2)) == kac2
    })
}

fn relation_suite() -> bool {
    let mut s = PointSampler::new(&IRREGULAR, 110);
    (0..3).all(|_| {
        let p = s.point();
        let (th, tt, b) = (qv(&p, Sym::Theta), qv(&p, Sym::ThetaT), qv(&p, Sym::Beta));
        let v = irregular_vertex(1, &tt.square(), &[th, q(1, 4)], &b, &Q::ONE, 6).unwrap();
        (0..=5usize).all(|m| (1..=m as i32 + 2).all(|n| rank1_relation_defect(&v, &Q::ONE, n, m).is_empty()))
    })
}

fn multiplicativity_suite() -> bool {
    let sp = SkewPoint::from_point(&PointSampler::new(&IRREGULAR, 111).point()).unwrap();
    (0..=6).all(|n| {
        partitions(n).iter().all(|l| {
            l.subpartitions().iter().all(|nu| {
                nu.subpartitions().iter().all(|ka| {
                    u_skew(l, nu, &sp).unwrap() * u_skew(nu, ka, &sp).unwrap() == u_skew(l, ka, &sp).unwrap()
                        && v_skew(l, nu, &sp).unwrap() * v_skew(nu, ka, &sp).unwrap() == v_skew(l, ka, &sp).unwrap()
                })
            })
        })
    })
}

fn random_series(s: &mut PointSampler, spec: &ChannelSpec<Q>, degree: u32) -> ChannelSeries<Q> {
    let mut out = ChannelSeries::zero(spec.clone(), degree);
    for n in -2..=2 {
        for k in -3..=3 {
            out.insert(n, k, s.rational());
        }
    }
    out
}

fn leibniz_suite() -> bool {
    let mut s = PointSampler::new(&[], 112);
    (0..4).all(|r| {
        let spec = ChannelSpec { r: r % 3 + 1, rate0: s.rational(), rate1: s.rational(), texp0: s.rational(), texp1: s.rational(), texp2: r as i64 - 2 };
        let (a, b) = (random_series(&mut s, &spec, 1), random_series(&mut s, &spec, 2));
        a.mul(&b).derive() == a.derive().mul(&b).add(&a.mul(&b.derive()))
    })
}

fn truncation_suite() -> bool {
    generic_points(Family::PV, 2, 113).iter().all(|p| {
        let small = ode_residual(&tau_series::<Q>(Family::PV, p, 1, 6, StructureMode::Reduced).unwrap(), p).unwrap();
        let big = ode_residual(&tau_series::<Q>(Family::PV, p, 2, 8, StructureMode::Reduced).unwrap(), p).unwrap();
        !small.trusted.is_empty() && small.trusted.iter().all(|&(n, k)| small.value(n, k) == big.value(n, k))
    })
}

fn cli(cache: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_tauforge")).args(args).env("TAUFORGE_CACHE_DIR", cache).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn cache_suite() -> bool {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let job = ["--seed", "7", "verify", "agt", "--order", "4", "--trials", "3"];
    let empty = cli(d, &["cache", "stats"]) == (0, "{\"entries\":0}\n".into());
    let cold = cli(d, &job);
    let one = cli(d, &["cache", "stats"]).1 == "{\"entries\":1}\n";
    let warm = cli(d, &job);
    let threads = |t: &str, args: &[&str]| {
        let mut v = vec!["--no-cache", "--threads", t];
        v.extend_from_slice(args);
        cli(d, &v)
    };
    let solve = ["conjecture", "solve-c", "--order", "4"];
    empty
        && cold.0 == 0
        && one
        && warm == cold
        && threads("1", &job) == cold
        && threads("4", &job) == cold
        && threads("1", &solve) == threads("4", &solve)
}

fn properties() -> Verdict {
    let suites: [(&str, fn() -> bool); 6] = [
        ("gram symmetry & det", gram_suite),
        ("rank-1 L_n relations n=1..m+2, m≤5", relation_suite),
        ("U/V multiplicativity", multiplicativity_suite),
        ("channel Leibniz", leibniz_suite),
        ("truncation stability", truncation_suite),
        ("cache determinism & thread independence", cache_suite),
    ];
    let results: Vec<(&str, bool)> = suites.iter().map(|(n, f)| (*n, f())).collect();
    verdict(
        results.iter().all(|r| r.1),
        results.iter().map(|(n, ok)| format!("{} {}", n, if *ok { "ok" } else { "FAILED" })).collect::<Vec<_>>().join("; "),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Verdict); 11] = [
        (1, "four-point block = (1-t)^(2θ0θ1)-dressed pair sum through t^6, 5 points", agt_dressing),
        (2, "hypergeometric specialization, n ≤ 8", hypergeometric),
        (3, "PVI first coefficient, 5 points", pvi_first_coefficient),
        (4, "degeneration ladder ratios in [8,12]", ladder),
        (5, "rank-1 irregular block a1, a2, 10 points", icb_rank_one),
        (6, "rank-2 irregular block t^-2, t^-4 and odd parity, 5 points", icb_rank_two),
        (7, "PV s=0 exact residual, 3 points", || exact_window::<Q>(Family::PV, 10, 114)),
        (8, "PV numeric residual < 1e-40 at 60 digits", || numeric(Family::PV, 10, 115)),
        (9, "PIV exact and numeric residuals", || {
            both(exact_window::<QuadExt>(Family::PIV, 12, 116), numeric(Family::PIV, 12, 117))
        }),
        (10, "skew-expansion coefficients through order 5", skew_conjecture),
        (11, "property suites", properties),
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (n, name, f) in criteria {
        let t = Instant::now();
        let v = f();
        let secs = t.elapsed().as_secs_f64();
        println!("criterion {:>2}: {} — {} [{:.1}s]", n, if v.pass { "PASS" } else { "FAIL" }, name, secs);
        println!("              {}", v.detail);
        passed += v.pass as usize;
        if !v.pass && !KNOWN_FAILURES.contains(&n) {
            unexpected.push(n);
        }
    }
    println!("acceptance: {}/11 pass; documented failures {:?}; unexpected failures {:?}", passed, KNOWN_FAILURES, unexpected);
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
