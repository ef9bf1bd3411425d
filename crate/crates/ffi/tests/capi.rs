use std::ffi::{CStr, CString};
use std::ptr;

use dstirap_gate_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe {
        dsg_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(dsg_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn c6_and_blockade() {
    let mut c6 = 0.0;
    assert_eq!(unsafe { dsg_c6(1, &mut c6) }, DsgStatus::Ok);
    assert!((c6 - 10.01293).abs() < 1e-9);
    let mut v = 0.0;
    assert_eq!(unsafe { dsg_interaction_strength(6.0, 126, &mut v) }, DsgStatus::Ok);
    let omega_c = 3.0 * 2.0 * std::f64::consts::PI * 44.0;
    assert!((89.0..=99.0).contains(&(v / omega_c)));
    assert_eq!(unsafe { dsg_interaction_strength(-1.0, 126, &mut v) }, DsgStatus::InvalidArgument);
    assert!(last_error().contains("l"));
}

#[test]
fn ideal_grover() {
    let mut p = 0.0;
    assert_eq!(unsafe { dsg_grover(3, 2, ptr::null(), &mut p) }, DsgStatus::Ok);
    assert!((p - 0.9453).abs() < 1e-3);
    assert_eq!(unsafe { dsg_grover(1, 1, ptr::null(), &mut p) }, DsgStatus::InvalidArgument);
}

#[test]
fn null_pointers_are_reported() {
    assert_eq!(unsafe { dsg_gate_fidelity(ptr::null(), ptr::null_mut()) }, DsgStatus::NullPointer);
    assert_eq!(unsafe { dsg_config_default(ptr::null_mut()) }, DsgStatus::NullPointer);
    assert_eq!(unsafe { dsg_channel_dim(ptr::null()) }, 0);
    unsafe {
        dsg_config_free(ptr::null_mut());
        dsg_channel_free(ptr::null_mut());
    }
}

#[test]
fn config_errors_leave_handle_unchanged() {
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(dsg_config_default(&mut cfg), DsgStatus::Ok);
        assert_eq!(dsg_config_set_qubits(cfg, 7), DsgStatus::Config);
        assert!(last_error().contains("geometry.qubits"));
        let mut n = 0;
        assert_eq!(dsg_config_qubits(cfg, &mut n), DsgStatus::Ok);
        assert_eq!(n, 2);
        assert_eq!(dsg_config_set_qubits(cfg, 3), DsgStatus::Ok);
        assert_eq!(dsg_config_qubits(cfg, &mut n), DsgStatus::Ok);
        assert_eq!(n, 3);
        dsg_config_free(cfg);
    }
}

#[test]
fn toml_parsing() {
    let good = CString::new("[pulse]\ntotal_time_us = 0.8\n").unwrap();
    let bad = CString::new("[pulse]\ntotal_tme_us = 0.8\n").unwrap();
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(dsg_config_from_toml(good.as_ptr(), &mut cfg), DsgStatus::Ok);
        dsg_config_free(cfg);
        assert_eq!(dsg_config_from_toml(bad.as_ptr(), &mut cfg), DsgStatus::Config);
    }
    assert!(last_error().contains("total_tme_us"));
}

#[test]
fn channel_round_trip() {
    let mut cfg = ptr::null_mut();
    let mut ch = ptr::null_mut();
    unsafe {
        assert_eq!(dsg_config_default(&mut cfg), DsgStatus::Ok);
        assert_eq!(dsg_config_set_decay(cfg, false), DsgStatus::Ok);
        assert_eq!(dsg_extract_channel(cfg, &mut ch), DsgStatus::Ok);
        let d = dsg_channel_dim(ch);
        assert_eq!(d, 4);
        let n = d * d * d * d;
        let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
        assert_eq!(dsg_channel_superop(ch, re.as_mut_ptr(), im.as_mut_ptr(), n - 1), DsgStatus::InvalidArgument);
        assert_eq!(dsg_channel_superop(ch, re.as_mut_ptr(), im.as_mut_ptr(), n), DsgStatus::Ok);
        // trace of the image of |0⟩⟨0| lies in (0, 1]
        let trace: f64 = (0..d).map(|i| re[(i + i * d) * d * d]).sum();
        assert!(trace > 0.9 && trace <= 1.0 + 1e-6, "{trace}");
        let mut f = 0.0;
        assert_eq!(dsg_channel_fidelity(ch, std::f64::consts::PI, &mut f), DsgStatus::Ok);
        assert!(f > 0.97, "{f}");
        let mut p = 0.0;
        assert_eq!(dsg_grover(2, 1, ch, &mut p), DsgStatus::Ok);
        assert!(p > 0.9 && p <= 1.0 + 1e-8, "{p}");
        assert_eq!(dsg_grover(3, 1, ch, &mut p), DsgStatus::InvalidArgument);
        dsg_channel_free(ch);
        dsg_config_free(cfg);
    }
}
