use std::f64::consts::PI;

use hallmhd::config::parse_config;
use hallmhd::experiments::{fit_decay, heat_oracle_radial, RadialProfile};
use hallmhd::pipeline;
use hallmhd::series::TimeSeries;
use proptest::prelude::*;

#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

#[test]
fn oracle_matches_closed_forms() {
    // γ = 1: |û|² = 1/ρ, so the squared norms reduce to elementary integrals
    let times = [0.1, 1.0, 7.5, 100.0, 3000.0];
    let profile = RadialProfile::matched(1.0);
    let s0 = heat_oracle_radial(&profile, 0.0, &times).unwrap();
    let s1 = heat_oracle_radial(&profile, 1.0, &times).unwrap();
    for (i, &t) in times.iter().enumerate() {
        let a = 2.0 * t;
        let e0 = PI * (1.0 - (-a).exp()) / t;
        let e1 = 4.0 * PI * (1.0 - (1.0 + a) * (-a).exp()) / (2.0 * a * a);
        assert!((s0.values()[i] - e0.sqrt()).abs() < 1e-10 * e0.sqrt(), "t = {t}");
        assert!((s1.values()[i] - e1.sqrt()).abs() < 1e-10 * e1.sqrt(), "t = {t}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fit_recovers_exact_power_laws(p in -3.0f64..-0.1, c in 0.1f64..10.0, lo in 1.0f64..10.0) {
        let mut ts = TimeSeries::new("x");
        for i in 0..40 {
            let t = lo + i as f64 * 0.5;
            ts.push(t, c * (1.0 + t).powf(p)).unwrap();
        }
        let fit = fit_decay(&ts, (lo, lo + 19.5)).unwrap();
        prop_assert!((fit.exponent - p).abs() < 1e-10);
        prop_assert!(fit.warning.is_none());
    }
}

fn zero_config(dir: &std::path::Path) -> String {
    format!(
        r#"output_dir = "{}"
[grid]
n = 16
M = 1.0
[physics]
mu = 1.0
nu = 1.0
kappa = 1.0
[integrator]
dt = 0.01
scheme = "IF-RK2"
t_end = 0.1
[data]
amplitude = 0.0
spectrum_slope = 0.0
band = [0.0, 2.0]
seed = 3
[diagnostics]
sample_dt = 0.02
norms = [{{ kind = "l2" }}, {{ kind = "hdot", s = 1.0 }}]
besov = [{{ s = -1.5, p = 2, r = "inf" }}]
"#,
        dir.display()
    )
}

#[test]
fn zero_amplitude_run_records_zeros() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = parse_config(&zero_config(tmp.path())).unwrap();
    let summary = pipeline::run(&cfg, None).unwrap();
    assert_eq!(summary.samples, 6);
    let text = std::fs::read_to_string(tmp.path().join(pipeline::DIAGNOSTICS_FILE)).unwrap();
    let mut lines = 0;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in ["E", "diss_u", "diss_B", "blowup_proxy"] {
            assert_eq!(v[key], 0.0, "{key} in {line}");
        }
        for (group, count) in [("Hs_norms", 4), ("besov_neg", 2)] {
            let obj = v[group].as_object().unwrap();
            assert_eq!(obj.len(), count);
            assert!(obj.values().all(|x| *x == 0.0), "{line}");
        }
        lines += 1;
    }
    assert_eq!(lines, 6);
}

#[test]
fn config_errors_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let base = zero_config(tmp.path());
    let unknown = base.replace("kappa = 1.0", "kappa = 1.0\nkapa = 2.0");
    assert!(parse_config(&unknown).unwrap_err().to_string().contains("kapa"));
    let sigma = format!("{base}[regularity]\nsigma = 2.5\ngamma = 1.5\ns = 0.0\n");
    let err = parse_config(&sigma).unwrap_err().to_string();
    assert!(err.contains("sigma must lie in (0,2)"), "{err}");
    // 0.25 dx² is about 0.039 on n = 16 at M = 1
    let cfl = base
        .replace("amplitude = 0.0", "amplitude = 1.0")
        .replace("dt = 0.01", "dt = 0.05")
        .replace("sample_dt = 0.02", "sample_dt = 0.05");
    let err = parse_config(&cfl).unwrap_err().to_string();
    assert!(err.contains("Hall CFL"), "{err}");
    assert!(err.contains("bound"), "{err}");
    let coarse = base.replace("n = 16", "n = 8");
    let err = parse_config(&coarse).unwrap_err().to_string();
    assert!(err.contains("diagnostics.besov"), "{err}");
}
