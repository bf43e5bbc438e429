use tauforge::field::{q, Field, Q};
use tauforge::nekrasov::*;
use tauforge::partition::Partition;
use tauforge::pit::PointSampler;
use tauforge::scalar::{ParameterPoint, Sym};

const FOUR: [Sym; 5] = [Sym::Theta0, Sym::ThetaT, Sym::Sigma, Sym::Theta1, Sym::ThetaInf];

#[test]
fn block_matches_dressed_sum_through_order_six() {
    let mut s = PointSampler::new(&FOUR, 11);
    for _ in 0..2 {
        let p = s.point();
        let r = agt_equivalence_check(&p, 6, Dressing::ThetaTTheta1).unwrap();
        assert!(r.pass, "mismatch at order {:?} for {:?}", r.first_mismatch, p);
    }
}

#[test]
fn printed_exponent_breaks_at_first_order() {
    let mut s = PointSampler::new(&FOUR, 12);
    let p = s.point();
    let r = agt_equivalence_check(&p, 2, Dressing::Theta0Theta1).unwrap();
    assert_eq!(r.first_mismatch, Some(1));
}

#[test]
fn hypergeometric_slice() {
    let (t0, t1, ti) = (q(2, 7), q(1, 3), q(-3, 5));
    let p = ParameterPoint::new()
        .with(Sym::Theta0, t0.clone())
        .with(Sym::ThetaT, q(1, 2))
        .with(Sym::Sigma, &t0 + q(1, 2))
        .with(Sym::Theta1, t1.clone())
        .with(Sym::ThetaInf, ti.clone());
    let sum = block_sum_at(NekrasovKind::Full4, &p, 6).unwrap();
    let mut fact = Q::ONE;
    let mut prod = Q::ONE;
    for n in 1..=6i64 {
        fact *= Q::from(n);
        let x = &t1 + &t0 + Q::from(n) - q(1, 2);
        prod *= (x.square() - ti.square()) / (q(2, 1) * &t0 + Q::from(n));
        assert_eq!(sum[n as usize], &prod / &fact, "n={n}");
    }
}

#[test]
fn swap_symmetry() {
    let mut s = PointSampler::new(&FOUR, 13);
    let p = s.point();
    let a = NekParams::from_point(NekrasovKind::Full4, &p).unwrap();
    let mut b = a.clone();
    b.sigma = Some(-a.sigma.clone().unwrap());
    for (l, m) in pairs_of_size(4) {
        let x = nekrasov_factor(NekrasovKind::Full4, &l, &m, &a).unwrap();
        let y = nekrasov_factor(NekrasovKind::Full4, &m, &l, &b).unwrap();
        assert_eq!(x, y, "{l} {m}");
    }
    let _ = Partition::empty();
}

#[test]
fn ladder_ratios() {
    let p = ParameterPoint::new()
        .with(Sym::Theta0, q(1, 3))
        .with(Sym::ThetaT, q(2, 7))
        .with(Sym::Sigma, q(3, 11))
        .with(Sym::ThetaStar, q(1, 5))
        .with(Sym::ThetaSStar, q(-2, 9));
    let lams = [q(100, 1), q(1000, 1), q(10000, 1)];
    for (a, b) in &EDGES[..4] {
        let r = degeneration_limit_check(*a, *b, &p, &lams, 3).unwrap();
        assert!(r.within(3, 8.0, 12.0), "{:?}->{:?}: {:?}", a, b, r.ratios);
    }
    // the last edge has no 1/Λ term: k = 1 is exact and the rest fall by 100
    let r = degeneration_limit_check(NekrasovKind::PIIID7, NekrasovKind::PIIID8, &p, &lams, 3).unwrap();
    assert!(r.deviation.iter().all(|d| d[1] == 0.0));
    assert!(r.ratios.iter().all(|x| x[2..].iter().all(|&v| (v - 100.0).abs() < 0.5)));
}
