//! Exercises the C ABI from Rust, including error propagation.

use std::ffi::{CStr, CString};
use std::ptr;

use hspsim_ffi::*;

fn last_error() -> String {
    let p = hsp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn jsa_handle_lifecycle() {
    let name = CString::new("paper-like").unwrap();
    let mut jsa: *mut HspJsa = ptr::null_mut();
    let s =
        unsafe { hsp_jsa_build_preset(name.as_ptr(), 780e-9, 80e9, 1563.5e-9, 256, 5.0, &mut jsa) };
    assert_eq!(s, HspStatus::Ok);
    assert!(hsp_last_error_message().is_null());

    let (mut ns, mut ni) = (0usize, 0usize);
    assert_eq!(
        unsafe { hsp_jsa_shape(jsa, &mut ns, &mut ni) },
        HspStatus::Ok
    );
    assert_eq!((ns, ni), (256, 256));

    let (mut k, mut p) = (0.0, 0.0);
    assert_eq!(
        unsafe { hsp_jsa_schmidt(jsa, &mut k, &mut p) },
        HspStatus::Ok
    );
    assert!((4.0..=6.0).contains(&k), "{k}");
    assert!((p * k - 1.0).abs() < 1e-12);

    let mut filtered: *mut HspJsa = ptr::null_mut();
    let s = unsafe {
        hsp_jsa_apply_filter(
            jsa,
            HspArm::Idler,
            HspShape::Rect,
            0.0,
            0.5e-9,
            HspWidthUnit::Meters,
            &mut filtered,
        )
    };
    assert_eq!(s, HspStatus::Ok);
    let mut pf = 0.0;
    assert_eq!(
        unsafe { hsp_jsa_schmidt(filtered, ptr::null_mut(), &mut pf) },
        HspStatus::Ok
    );
    assert!(pf > p);
    let mut eff = 0.0;
    assert_eq!(
        unsafe { hsp_jsa_heralding_efficiency(filtered, &mut eff) },
        HspStatus::Ok
    );
    assert!(eff > 0.0 && eff < 1.0);
    let mut fwhm = 0.0;
    assert_eq!(
        unsafe { hsp_jsa_marginal_fwhm_hz(filtered, HspArm::Signal, &mut fwhm) },
        HspStatus::Ok
    );
    assert!(fwhm > 60e9 && fwhm < 120e9, "{fwhm}");

    unsafe {
        hsp_jsa_free(filtered);
        hsp_jsa_free(jsa);
        hsp_jsa_free(ptr::null_mut());
    }
}

#[test]
fn unknown_preset_is_a_domain_error() {
    let name = CString::new("bbo").unwrap();
    let mut jsa: *mut HspJsa = ptr::null_mut();
    let s =
        unsafe { hsp_jsa_build_preset(name.as_ptr(), 780e-9, 80e9, 1563.5e-9, 64, 5.0, &mut jsa) };
    assert_eq!(s, HspStatus::Domain);
    assert!(jsa.is_null());
    assert!(last_error().contains("available presets"));
}

#[test]
fn null_pointers_rejected() {
    let s = unsafe { hsp_jsa_schmidt(ptr::null(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(s, HspStatus::NullPointer);
    assert!(last_error().contains("jsa"));
    assert_eq!(
        unsafe { hsp_dfg_g2(1.0, 5.0, ptr::null_mut()) },
        HspStatus::NullPointer
    );
}

#[test]
fn photon_statistics_and_visibility() {
    let mut coherent = [0.0; 3];
    assert_eq!(
        unsafe { hsp_coherent_stats(0.05, 2, coherent.as_mut_ptr(), 3) },
        HspStatus::Ok
    );
    assert!((coherent[1] - 0.047561471225035706).abs() < 1e-15);
    assert_eq!(
        unsafe { hsp_coherent_stats(0.05, 2, coherent.as_mut_ptr(), 5) },
        HspStatus::InvalidArgument
    );

    let mut hsp = [0.0; 3];
    assert_eq!(
        unsafe { hsp_hsp_stats(0.05, 0.5, hsp.as_mut_ptr()) },
        HspStatus::Ok
    );
    assert!((hsp[1] - 0.45).abs() < 1e-15 && (hsp[2] - 0.025).abs() < 1e-15);
    assert_eq!(
        unsafe { hsp_hsp_stats(0.05, 1.0, hsp.as_mut_ptr()) },
        HspStatus::Domain
    );

    let (mut v, mut sup, mut oracle) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(
            hsp_visibility(
                coherent.as_ptr(),
                3,
                [0.525, 0.45, 0.025].as_ptr(),
                3,
                1.0,
                &mut v,
                &mut sup
            ),
            HspStatus::Ok
        );
        assert_eq!(
            hsp_fock_oracle(
                coherent.as_ptr(),
                3,
                [0.525, 0.45, 0.025].as_ptr(),
                3,
                1.0,
                &mut oracle
            ),
            HspStatus::Ok
        );
    }
    assert!((sup - 0.4672290720311486).abs() < 1e-12);
    assert!((v + sup - 1.0).abs() < 1e-15);
    assert!((oracle - sup).abs() < 1e-12);

    let four = [0.9, 0.05, 0.03, 0.02];
    let s = unsafe { hsp_fock_oracle(four.as_ptr(), 4, four.as_ptr(), 4, 1.0, &mut oracle) };
    assert_eq!(s, HspStatus::Domain);
    assert!(last_error().contains("truncate"));
}

#[test]
fn dfg_helpers() {
    let mut g2 = 0.0;
    assert_eq!(unsafe { hsp_dfg_g2(30.0, 5.0, &mut g2) }, HspStatus::Ok);
    assert!((g2 - (1.0 + 1.0 / 35.0)).abs() < 1e-15);
    let mut lambda = 0.0;
    assert_eq!(
        unsafe { hsp_dfg_partner_wavelength(780e-9, 1563.5e-9, &mut lambda) },
        HspStatus::Ok
    );
    assert!((lambda - 1556.515634971283e-9).abs() < 1e-18);
    assert_eq!(
        unsafe { hsp_dfg_partner_wavelength(780e-9, 700e-9, &mut lambda) },
        HspStatus::Domain
    );
}

#[test]
fn scenario_run_through_abi() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = tmp.path().join("g2.scenario");
    std::fs::write(
        &scenario,
        "name = \"g2\"\noutputs = [\"dfg_g2_curve\"]\n[statistics]\nn_seed = 0.0\nschmidt_k = 5.0\n\
         [sweep]\nvariable = \"n_seed\"\nvalues = [0.0, 30.0]\n",
    )
    .unwrap();
    let path = CString::new(scenario.to_str().unwrap()).unwrap();
    let out = CString::new(tmp.path().join("out").to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { hsp_scenario_run(path.as_ptr(), out.as_ptr(), 1) },
        HspStatus::Ok
    );
    assert!(tmp.path().join("out/manifest.json").exists());

    std::fs::write(&scenario, "name = 3\n").unwrap();
    assert_eq!(
        unsafe { hsp_scenario_run(path.as_ptr(), out.as_ptr(), 0) },
        HspStatus::Scenario
    );
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(hsp_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
