//! End-to-end acceptance checks. Each test writes one `criterion N: PASS|FAIL`
//! line straight to stderr, so the lines show even when output is captured.

use std::io::Write;
use std::time::{Duration, Instant};

use natop::graph_space::{check_vforder_bound, decorated_space_shuffled, dim_h0_via_delta_h, enumerate_decorated, independence_rank};
use natop::jet_calculus::ideal::{aa_naive, b3_naive, verify_ideal_suite};
use natop::jet_calculus::identities::identity;
use natop::jet_calculus::multilinear::{in_fl, in_frt, phi_map, psi_map, random_fl, random_frt};
use natop::jet_calculus::{check_zero, JetContext};
use natop::perm_algebra::{
    check_relation_eq3, generates_kernel, kernel_basis, submodule_rank, theta, ENaughtElement, GeneratorFamily,
};
use natop::perm_algebra::symbols::t_symbol;
use natop::linalg::rank;
use natop::scalar::Zero;
use natop::Q;

fn report(n: u32, pass: bool, detail: &str, elapsed: Duration) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {n}: {verdict} ({detail}; {:.2} s)\n", elapsed.as_secs_f64());
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(pass, "criterion {n} failed: {detail}");
}

#[test]
fn criterion_1_dimension_reproduction() {
    let start = Instant::now();
    let d1 = (enumerate_decorated::<Q>(1).unwrap(), dim_h0_via_delta_h::<Q>(1).unwrap());
    let d2 = (enumerate_decorated::<Q>(2).unwrap(), dim_h0_via_delta_h::<Q>(2).unwrap());
    let elapsed = start.elapsed();
    let pass = d1 == (1, 1) && d2 == (7, 7) && elapsed < Duration::from_secs(10);
    report(1, pass, &format!("d=1 decorated/delta_h {}/{}, d=2 {}/{}", d1.0, d1.1, d2.0, d2.1), elapsed);
}

#[test]
fn criterion_2_kernel_dimensions() {
    let start = Instant::now();
    let mut dims = Vec::new();
    let mut pass = true;
    for n in 2..=6 {
        let basis = kernel_basis::<Q>(n).unwrap();
        // rank–nullity: the basis is independent and lies in ker ϑ
        let independent = rank(&basis.iter().map(ENaughtElement::to_dense).collect::<Vec<_>>()) == basis.len();
        let in_kernel = basis.iter().all(|k| theta(k).is_zero());
        pass &= independent && in_kernel && basis.len() == n * (n - 1) - 1;
        dims.push(basis.len().to_string());
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(30);
    report(2, pass, &format!("dim Kr(2..6) = {}", dims.join(", ")), elapsed);
}

#[test]
fn criterion_3_generator_families() {
    let start = Instant::now();
    let mut pass = true;
    for n in 2..=6 {
        pass &= generates_kernel(&GeneratorFamily::<Q>::Classical.symbols(n).unwrap()).unwrap();
        pass &= generates_kernel(&GeneratorFamily::<Q>::Canonical.symbols(n).unwrap()).unwrap();
    }
    let t3 = ENaughtElement::from_group_algebra(&t_symbol::<Q>(3).unwrap()).unwrap();
    let t3_rank = submodule_rank(&[t3]).unwrap();
    pass &= t3_rank == 3;
    let eq3 = (3..=6).all(|n| check_relation_eq3::<Q>(n).unwrap());
    pass &= eq3;
    report(
        3,
        pass,
        &format!("classical and canonical generate Kr(2..6); {{t3}} rank {t3_rank} of 5; eq3 for n=3..6 {eq3}"),
        start.elapsed(),
    );
}

#[test]
fn criterion_4_identity_suite() {
    let start = Instant::now();
    let names = ["bianchi1", "bianchi2", "ricci1", "ricci2", "split14", "split15-1", "split15-2"];
    let mut failures = Vec::new();
    for m in [2, 3] {
        for name in names {
            let id = identity::<Q>(name).unwrap();
            let ctx = JetContext { symmetric: id.symmetric, ..JetContext::new(m) };
            if !check_zero(&id.residual, &ctx).unwrap().is_zero() {
                failures.push(format!("{name}@m={m}"));
            }
        }
    }
    // the form with the extra −½T(T(X,Y),Z) term must not vanish
    let printed = identity::<Q>("split14-extra-term").unwrap();
    let printed_nonzero = !check_zero(&printed.residual, &JetContext::new(3)).unwrap().is_zero();
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && printed_nonzero && elapsed < Duration::from_secs(120);
    let detail = if failures.is_empty() {
        format!("{} residuals zero at m=2,3; uncorrected 1.4 form nonzero: {printed_nonzero}", names.len())
    } else {
        format!("nonzero: {}", failures.join(", "))
    };
    report(4, pass, &detail, elapsed);
}

#[test]
fn criterion_5_ideal_tensor_suite() {
    let start = Instant::now();
    let ctx = JetContext::new(3);
    let mut pass = true;
    let mut failed = Vec::new();
    let required = [
        (3, &["iT3:t1", "iT3:t2", "iR3+iT3:aa", "iL3:l1"][..]),
        (4, &["iR4:b1", "iR4:b3", "iT4:t1", "iT4:t2", "iR4+iT4:aa", "iL4:l1", "iL4:l2", "iL4:l3", "iL4:l4"][..]),
    ];
    for (n, keys) in required {
        let suite = verify_ideal_suite::<Q>(n, &ctx).unwrap();
        for k in keys {
            match suite.get(*k) {
                Some(v) if v.is_zero() => {}
                _ => {
                    pass = false;
                    failed.push(k.to_string());
                }
            }
        }
        for (k, v) in &suite {
            if !v.is_zero() {
                pass = false;
                failed.push(k.clone());
            }
        }
    }
    let aa = aa_naive::<Q>(&ctx).unwrap();
    let b3 = b3_naive::<Q>(&ctx).unwrap();
    pass &= aa.witness().is_some() && b3.witness().is_some();
    let detail = if failed.is_empty() {
        format!(
            "suites n=3,4 zero at m=3; (R, nabla T) fails aa with {}; nabla R fails b3 with {}",
            aa.witness().unwrap_or("no witness"),
            b3.witness().unwrap_or("no witness")
        )
    } else {
        format!("failed: {}", failed.join(", "))
    };
    report(5, pass, &detail, start.elapsed());
}

#[test]
fn criterion_6_lemma_round_trip() {
    let start = Instant::now();
    let mut pass = true;
    let mut checked = 0;
    for n in 3..=5 {
        for dx in 2..=3 {
            for seed in 0..5 {
                let l = random_fl::<Q>(n, dx, 1, seed).unwrap();
                let (r, t) = phi_map(&l).unwrap();
                pass &= !l.is_zero() && in_fl(&l).unwrap() && in_frt(&r, &t).unwrap() && psi_map(&r, &t).unwrap() == l;

                let (r, t) = random_frt::<Q>(n, dx, 1, seed).unwrap();
                let back = phi_map(&psi_map(&r, &t).unwrap()).unwrap();
                pass &= !(r.is_zero() && t.is_zero()) && in_frt(&r, &t).unwrap() && back == (r, t);
                checked += 2;
            }
        }
    }
    report(6, pass, &format!("{checked} exact round trips, n=3..5, dx=2,3"), start.elapsed());
}

/// Rank at `m = 2`, below the stable range, recorded as a regression value.
const RANK_D2_M2: usize = 6;

#[test]
fn criterion_7_bridge_rank() {
    let start = Instant::now();
    let fam = || GeneratorFamily::<Q>::Classical;
    let r23 = independence_rank(2, 3, 8, fam()).unwrap();
    let r11 = independence_rank(1, 1, 3, fam()).unwrap();
    let r22 = independence_rank(2, 2, 8, fam()).unwrap();
    let pass = r23 == 7 && r11 == 1 && r22 <= 7 && r22 == RANK_D2_M2;
    report(7, pass, &format!("rank(d=2,m=3) = {r23}, rank(d=1,m=1) = {r11}, rank(d=2,m=2) = {r22}"), start.elapsed());
}

#[test]
fn criterion_8_vforder_bound() {
    let start = Instant::now();
    let mut pass = true;
    let mut schemes = 0;
    for d in 1..=3 {
        for a in 0..d {
            let r = check_vforder_bound(d, a, &GeneratorFamily::<Q>::Classical).unwrap();
            pass &= r.pass && (a > 0 || !r.vf_zero_uses_v);
            schemes += r.schemes;
        }
    }
    report(8, pass, &format!("{schemes} contraction schemes at d<=3, every vf-order"), start.elapsed());
}

/// `dim Gr[Kr](3)`, computed once by this implementation.
const DIM_D3: usize = 98;

#[test]
fn criterion_9_d3_regression() {
    let start = Instant::now();
    let decorated = enumerate_decorated::<Q>(3).unwrap();
    let via_delta = dim_h0_via_delta_h::<Q>(3).unwrap();
    let shuffled = decorated_space_shuffled::<Q>(3, 7).unwrap().dimension();
    let elapsed = start.elapsed();
    let pass = decorated == DIM_D3 && via_delta == DIM_D3 && shuffled == DIM_D3 && elapsed < Duration::from_secs(600);
    report(9, pass, &format!("d=3 decorated {decorated}, delta_h {via_delta}, shuffled {shuffled}"), elapsed);
}
