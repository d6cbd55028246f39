use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use functree_ffi::*;

unsafe fn take_string(s: *mut c_char) -> String {
    let owned = CStr::from_ptr(s).to_str().unwrap().to_string();
    ft_string_free(s);
    owned
}

unsafe fn worked_tree() -> *mut FtTree {
    let g = [0usize, 0, 1, 1];
    let mut t = ptr::null_mut();
    assert_eq!(ft_tree_from_parent_map(g.as_ptr(), g.len(), &mut t), FtStatus::Ok);
    t
}

#[test]
fn labeling_and_decomposition_round_trip() {
    unsafe {
        let t = worked_tree();
        assert_eq!(ft_tree_vertex_count(t), 4);

        let sigma = [0usize, 3, 2, 1];
        let mut lab = ptr::null_mut();
        assert_eq!(ft_labeling_verify(t, sigma.as_ptr(), 4, &mut lab), FtStatus::Ok);
        let mut buf = [usize::MAX; 4];
        assert_eq!(ft_labeling_sigma(lab, buf.as_mut_ptr(), 4), FtStatus::Ok);
        assert_eq!(buf, sigma);
        assert_eq!(ft_labeling_sigma(lab, buf.as_mut_ptr(), 3), FtStatus::BufferTooSmall);

        let target = CString::new("knn").unwrap();
        let mut d = ptr::null_mut();
        assert_eq!(ft_decompose(t, lab, target.as_ptr(), 1, &mut d), FtStatus::Ok);
        assert_eq!(ft_decomposition_copy_count(d), 4);
        let mut pass = false;
        assert_eq!(ft_decomposition_verify(d, &mut pass), FtStatus::Ok);
        assert!(pass);

        let dot = CString::new("dot").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(ft_decomposition_export(d, dot.as_ptr(), &mut s), FtStatus::Ok);
        assert_eq!(take_string(s).matches("digraph frame_").count(), 4);

        let json = CString::new("json").unwrap();
        assert_eq!(ft_labeling_export(lab, json.as_ptr(), &mut s), FtStatus::Ok);
        assert_eq!(take_string(s), r#"{"sigma":[0,3,2,1]}"#);

        let mut kappa_error = f64::NAN;
        assert_eq!(
            ft_apportion_check(t, lab, 1e-9, &mut kappa_error, &mut pass),
            FtStatus::Ok
        );
        assert!(pass && kappa_error < 1e-9);

        ft_decomposition_free(d);
        ft_labeling_free(lab);
        ft_tree_free(t);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let bad = CString::new("[1,0]").unwrap();
        let mut t = ptr::null_mut();
        assert_eq!(ft_tree_from_json(bad.as_ptr(), &mut t), FtStatus::NotAFunctionalTree);
        assert!(t.is_null());
        let msg = take_string(ft_last_error_message());
        assert!(msg.contains("functional tree"), "{msg}");

        let t = worked_tree();
        let identity = [0usize, 1, 2, 3];
        let mut lab = ptr::null_mut();
        assert_eq!(
            ft_labeling_verify(t, identity.as_ptr(), 4, &mut lab),
            FtStatus::NotBetaLabeling
        );

        assert_eq!(ft_labeling_find(t, &mut lab), FtStatus::Ok);
        let svg = CString::new("svg").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(ft_tree_export(t, svg.as_ptr(), &mut s), FtStatus::UnsupportedFormat);
        assert_eq!(ft_labeling_find(ptr::null(), &mut lab), FtStatus::NullPointer);

        let mut expected = ptr::null_mut();
        let mut pass = false;
        assert_eq!(ft_certificate_magnitude(t, &mut expected, &mut pass), FtStatus::Ok);
        assert!(pass);
        assert_eq!(take_string(expected), "149299200");

        ft_labeling_free(lab);
        ft_tree_free(t);
        ft_tree_free(ptr::null_mut());
        ft_string_free(ptr::null_mut());
    }
}

#[test]
fn generated_header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/functree.h");
    let text = std::fs::read_to_string(&header).expect("build script writes the header");
    for symbol in [
        "ft_tree_from_parent_map",
        "ft_decompose",
        "ft_last_error_message",
        "FT_STATUS_OK",
    ] {
        assert!(text.contains(symbol), "{symbol} missing from header");
    }
    let dir = scratch_dir();
    let source = dir.join("probe.c");
    std::fs::write(
        &source,
        "#include \"functree.h\"\nint main(void) { return FT_STATUS_OK; }\n",
    )
    .unwrap();
    let status = Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&source)
        .status();
    let _ = std::fs::remove_dir_all(&dir);
    match status {
        Ok(status) => assert!(status.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler found; skipped compiling the header"),
    }
}

fn scratch_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("functree-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
