mod common;

use common::rel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sheetgrasp::materials::{
    calibrate_ei, derive_stiffness, required_protrusion, CantileverSample, Material, MaterialLibrary, ProtrusionReference,
};
use sheetgrasp::Error;

const G: f64 = 9.81;

fn sag(lambda: f64, ei: f64, l: f64) -> f64 {
    lambda * G * l.powi(4) / (8.0 * ei)
}

#[test]
fn printing_80_stiffness() {
    let m = Material::from_gsm("p80", 80.0).unwrap();
    assert!(rel(m.thickness, (80.0 / 1000.0) / 800.0) < 1e-12);
    let s = derive_stiffness(&m).unwrap();
    assert!(rel(s.ei, 2e9 * 0.105 * 1e-12 / 12.0) < 1e-12);
    assert!(rel(s.lambda, 0.08 * 0.105) < 1e-12);
}

#[test]
fn invalid_materials_rejected() {
    assert!(matches!(Material::from_gsm("x", 0.0), Err(Error::InvalidMaterial(_))));
    assert!(Material::from_gsm("x", 80.0).unwrap().with_youngs_modulus(-1.0).is_err());
    assert!(Material::from_gsm("x", 80.0).unwrap().with_width(0.0).is_err());
    assert!(Material::from_gsm("x", 80.0).unwrap().with_friction(0.0, 0.1).is_err());
}

#[test]
fn calibration_round_trip() {
    let (ei, lambda) = (1.75e-5, 8.4e-3);
    let samples: Vec<_> = [0.02, 0.04, 0.06]
        .iter()
        .map(|&l| CantileverSample { protrusion: l, deflection: sag(lambda, ei, l) })
        .collect();
    let fit = calibrate_ei(&samples, lambda).unwrap();
    assert!(rel(fit.ei, ei) < 1e-9);
    assert!(fit.rms_residual < 1e-15);
}

#[test]
fn calibration_single_sample() {
    let lambda = 8.4e-3;
    let s = CantileverSample { protrusion: 0.06, deflection: sag(lambda, 1e-5, 0.06) };
    assert!(rel(calibrate_ei(&[s], lambda).unwrap().ei, 1e-5) < 1e-12);
}

#[test]
fn calibration_errors() {
    assert!(matches!(calibrate_ei(&[], 1e-2), Err(Error::Calibration(_))));
    let bad = [
        CantileverSample { protrusion: 0.05, deflection: 0.01 },
        CantileverSample { protrusion: 0.05, deflection: 0.0 },
    ];
    assert!(matches!(calibrate_ei(&bad, 1e-2), Err(Error::InvalidSample { index: 1, .. })));
}

#[test]
fn noisy_calibration_bound() {
    // ±5% on R moves each per-sample estimate by at most 1/0.95 - 1 ≈ 5.3%.
    let (ei, lambda) = (1.75e-5, 8.4e-3);
    let mut worst: f64 = 0.0;
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<_> = [0.02, 0.04, 0.06]
            .iter()
            .map(|&l| CantileverSample { protrusion: l, deflection: sag(lambda, ei, l) * (1.0 + rng.gen_range(-0.05..=0.05)) })
            .collect();
        worst = worst.max(rel(calibrate_ei(&samples, lambda).unwrap().ei, ei));
    }
    assert!(worst < 0.10, "worst relative error {worst}");
}

#[test]
fn protrusion_scaling_examples() {
    let reference = ProtrusionReference { ei: 1.75e-5, lambda: 8.4e-3, protrusion: 0.06 };
    assert!(rel(required_protrusion(1.75e-5, 8.4e-3, &reference).unwrap(), 0.06) < 1e-15);
    assert!(rel(required_protrusion(16.0 * 1.75e-5, 8.4e-3, &reference).unwrap(), 0.12) < 1e-12);
    let half = required_protrusion(8.75e-6, 8.4e-3, &reference).unwrap();
    assert!((half - 0.06 * 0.5f64.powf(0.25)).abs() < 1e-12);
    assert!((half - 0.05045).abs() < 1e-5);
    assert!(matches!(required_protrusion(0.0, 8.4e-3, &reference), Err(Error::Domain(_))));
}

#[test]
fn scaled_protrusion_keeps_sag() {
    let (ei_ref, lam_ref, l_ref) = (1.75e-5, 8.4e-3, 0.06);
    let reference = ProtrusionReference { ei: ei_ref, lambda: lam_ref, protrusion: l_ref };
    let (ei, lam) = (4.2e-4, 2.1e-2);
    let l = required_protrusion(ei, lam, &reference).unwrap();
    assert!(rel(sag(lam, ei, l), sag(lam_ref, ei_ref, l_ref)) < 1e-12);
}

#[test]
fn builtin_library() {
    let lib = MaterialLibrary::builtin();
    for gsm in [17.0, 35.0, 60.0, 80.0, 100.0, 120.0, 150.0, 200.0, 230.0, 250.0] {
        let m = lib.by_gsm(gsm).unwrap();
        assert!(!m.unvalidated);
        assert!(m.mu1 < m.mu0);
    }
    for name in ["cardboard-300", "tablecloth", "tissue"] {
        assert!(lib.by_name(name).unwrap().unvalidated);
    }
    assert!(matches!(lib.by_name("vellum"), Err(Error::UnknownMaterial(_))));
}

#[test]
fn library_json_round_trip() {
    let lib = MaterialLibrary::builtin();
    let again = MaterialLibrary::from_json_str(&lib.to_json_string()).unwrap();
    assert_eq!(lib.materials(), again.materials());
}

#[test]
fn library_rejects_malformed_json() {
    match MaterialLibrary::from_json_str("[{\"name\": \"a\", \"gsm\": }]") {
        Err(Error::Parse(msg)) => assert!(msg.contains("line 1"), "{msg}"),
        other => panic!("{other:?}"),
    }
    let unknown = r#"[{"name": "a", "gsm": 80, "mu0": 0.5, "mu1": 0.4, "width": 0.1, "colour": "red"}]"#;
    assert!(MaterialLibrary::from_json_str(unknown).is_err());
}
