use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use area_angle::fixtures::{FIVE_BUS_AREA, FIVE_BUS_CASE};
use area_angle_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = aa_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Loaded {
    net: *mut AaNetwork,
    area: *mut AaArea,
}

impl Loaded {
    fn five_bus() -> Self {
        let mut net = ptr::null_mut();
        let mut area = ptr::null_mut();
        unsafe {
            assert_eq!(
                aa_network_from_json(c(FIVE_BUS_CASE).as_ptr(), &mut net),
                AaStatus::Ok
            );
            assert_eq!(
                aa_area_from_json(net, c(FIVE_BUS_AREA).as_ptr(), &mut area),
                AaStatus::Ok
            );
        }
        Self { net, area }
    }
}

impl Drop for Loaded {
    fn drop(&mut self) {
        unsafe {
            aa_area_free(self.area);
            aa_network_free(self.net);
        }
    }
}

#[test]
fn baseline_quantities() {
    let h = Loaded::five_bus();
    unsafe {
        assert_eq!(aa_network_bus_count(h.net), 5);
        assert_eq!(aa_network_line_count(h.net), 8);
        let mut report = ptr::null_mut();
        assert_eq!(aa_baseline(h.net, h.area, &mut report), AaStatus::Ok);
        let mut base = AaBaseline::default();
        assert_eq!(aa_report_baseline(report, &mut base), AaStatus::Ok);
        assert!((base.theta_area_rad - 11.0 / 6.0).abs() < 1e-9);
        assert!((base.b_area - 600.0 / 11.0).abs() < 1e-9);
        assert!((base.p_area - 100.0).abs() < 1e-9);
        assert_eq!(base.border_count, 4);
        let expected = [
            (1, b'a', 0.5),
            (2, b'a', 0.5),
            (4, b'b', -0.2),
            (5, b'b', -0.8),
        ];
        for (i, &(bus, side, weight)) in expected.iter().enumerate() {
            let mut w = AaBorderWeight::default();
            assert_eq!(aa_report_weight(report, i, &mut w), AaStatus::Ok);
            assert_eq!((w.bus, w.side as u8), (bus, side));
            assert!((w.weight - weight).abs() < 1e-9);
        }
        let mut w = AaBorderWeight::default();
        assert_eq!(aa_report_weight(report, 4, &mut w), AaStatus::OutOfRange);
        assert_eq!(aa_report_outage_count(report), 0);
        aa_report_free(report);
    }
}

#[test]
fn scan_strings() {
    let h = Loaded::five_bus();
    unsafe {
        let mut report = ptr::null_mut();
        assert_eq!(aa_scan(h.net, h.area, 1, 1, &mut report), AaStatus::Ok);
        assert_eq!(aa_report_outage_count(report), 8);
        let csv = aa_report_to_csv(report);
        let text = CStr::from_ptr(csv).to_str().unwrap().to_owned();
        aa_string_free(csv);
        assert!(text.starts_with("line_id,islanding,"));
        assert_eq!(text.lines().count(), 10);
        let json = aa_report_to_json(report);
        let value: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        aa_string_free(json);
        assert_eq!(value["outages"].as_array().unwrap().len(), 8);
        aa_report_free(report);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut net = ptr::null_mut();
        assert_eq!(
            aa_network_from_json(c("{").as_ptr(), &mut net),
            AaStatus::Parse
        );
        assert!(net.is_null());
        assert!(last_error().contains("parse"));

        assert_eq!(
            aa_network_from_json(ptr::null(), &mut net),
            AaStatus::NullPointer
        );
        assert_eq!(
            aa_network_from_json(c(FIVE_BUS_CASE).as_ptr(), ptr::null_mut()),
            AaStatus::NullPointer
        );

        let unbalanced = FIVE_BUS_CASE.replacen("-80", "-81", 1);
        assert_eq!(
            aa_network_from_json(c(&unbalanced).as_ptr(), &mut net),
            AaStatus::InvalidNetwork
        );

        let h = Loaded::five_bus();
        let mut area = ptr::null_mut();
        let bad = r#"{"area_buses":[1,2,3,4,9],"side_a":[1,2],"side_b":[4,5]}"#;
        assert_eq!(
            aa_area_from_json(h.net, c(bad).as_ptr(), &mut area),
            AaStatus::UnknownBus
        );
        assert!(last_error().contains('9'));

        let mut report = ptr::null_mut();
        assert_eq!(
            aa_baseline(ptr::null(), h.area, &mut report),
            AaStatus::NullPointer
        );

        // a successful call clears the message
        assert_eq!(aa_baseline(h.net, h.area, &mut report), AaStatus::Ok);
        assert!(aa_last_error().is_null());
        aa_report_free(report);
    }
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        aa_network_free(ptr::null_mut());
        aa_area_free(ptr::null_mut());
        aa_report_free(ptr::null_mut());
        aa_string_free(ptr::null_mut());
        assert_eq!(aa_network_bus_count(ptr::null()), 0);
        assert!(aa_report_to_csv(ptr::null()).is_null());
    }
    let v = unsafe { CStr::from_ptr(aa_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_header() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib_dir = target_dir();
    assert!(
        lib_dir.join("libarea_angle_ffi.a").exists(),
        "static library not built"
    );
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let exe = tmp.join("aa_baseline_c");
    let status = Command::new(&cc)
        .arg(crate_dir.join("examples/baseline.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg("-Wall")
        .arg("-Werror")
        .arg("-o")
        .arg(&exe)
        .arg(lib_dir.join("libarea_angle_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success());

    let case = tmp.join("five_bus_case.json");
    let area = tmp.join("five_bus_area.json");
    std::fs::write(&case, FIVE_BUS_CASE).unwrap();
    std::fs::write(&area, FIVE_BUS_AREA).unwrap();
    let out = Command::new(&exe).arg(&case).arg(&area).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("theta_area_rad 1.833333333"));
    assert!(text.contains("weight 5 b -0.800000000"));
    assert!(text.contains("line_id,islanding,"));

    let missing = Command::new(&exe).arg(&case).arg(&case).output().unwrap();
    assert_eq!(missing.status.code(), Some(AaStatus::Parse as i32));
}
