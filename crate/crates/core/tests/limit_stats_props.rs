use std::sync::Arc;

use cfmod_core::limit_stats::{
    clt_check, e_f, sigma_f, szusz_frequencies, CltMode, MonteCarlo, SigmaConfig, SzuszTarget, TestFunction,
};
use cfmod_core::zmod::{Group, ModMatrix, Modulus};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

fn with_workers<T: Send>(n: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(f)
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let m = Modulus::new(3).unwrap();
    let run = || {
        let r = szusz_frequencies(&m, 500, &MonteCarlo::gauss(64, 77), SzuszTarget::Matrix).unwrap();
        format!("{r:?}")
    };
    assert_eq!(with_workers(1, run), with_workers(4, run));
}

/// `1_{I} - 1/|G_1|` on `G_1`, zero on `G_{-1}`.
fn centred_identity_indicator(m: u64) -> TestFunction {
    let group = Arc::new(Group::new(&Modulus::new(m).unwrap()).unwrap());
    let id = group.index_of(&ModMatrix::identity(m as u32)).unwrap();
    let g1 = group.class_range(0);
    let share = BigRational::new(1.into(), BigInt::from(g1.len()));
    let values = (0..group.len())
        .map(|i| {
            if !g1.contains(&i) {
                BigRational::zero()
            } else if i == id {
                BigRational::from_integer(1.into()) - &share
            } else {
                -share.clone()
            }
        })
        .collect();
    TestFunction::from_rationals("centred identity on G_1", group, values).unwrap()
}

#[test]
fn even_index_sums_follow_the_clt() {
    let f = centred_identity_indicator(2);
    assert!(e_f(&f).is_zero());
    let sigma = sigma_f(&f, &SigmaConfig::new(MonteCarlo::gauss(20_000, 31))).unwrap();
    let report = clt_check(
        &f,
        10_000,
        &MonteCarlo::gauss(10_000, 32),
        sigma.sigma_sq,
        sigma.total_error(),
        0.03,
    )
    .unwrap();
    assert_eq!(report.mode, CltMode::Ks);
    assert!(report.pass, "KS {} (sigma^2 {})", report.estimate, sigma.sigma_sq);
}
