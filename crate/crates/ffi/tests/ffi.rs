use elimpar_ffi::*;
use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;

fn data(name: &str) -> CString {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name);
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

fn last_error() -> String {
    let p = elimpar_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn load(name: &str) -> *mut ElimparGroupoid {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { elimpar_groupoid_from_json(data(name).as_ptr(), &mut g) }, ElimparStatus::Ok);
    g
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_string_lossy().into_owned();
    elimpar_string_free(s);
    out
}

#[test]
fn gf4_orbit_and_elimination() {
    let g = load("gf4.json");
    let mut n = 0usize;
    assert_eq!(unsafe { elimpar_groupoid_object_count(g, &mut n) }, ElimparStatus::Ok);
    assert_eq!(n, 1);
    let mut size = 0usize;
    let mut formula = ptr::null_mut();
    let tuple = CString::new("a").unwrap();
    assert_eq!(unsafe { elimpar_orbit(g, tuple.as_ptr(), &mut size, &mut formula) }, ElimparStatus::Ok);
    assert_eq!(size, 2);
    assert!(unsafe { take(formula) }.starts_with("exists"));
    let mut yes = false;
    assert_eq!(unsafe { elimpar_eliminates_parameters(g, 2, &mut yes) }, ElimparStatus::Ok);
    assert!(yes);
    unsafe { elimpar_groupoid_free(g) };
}

#[test]
fn linear_orders_do_not_eliminate() {
    let g = load("linear_orders.json");
    let mut yes = true;
    assert_eq!(unsafe { elimpar_eliminates_parameters(g, 1, &mut yes) }, ElimparStatus::Ok);
    assert!(!yes);
    let mut size = 0usize;
    let mut formula = ptr::null_mut();
    let tuple = CString::new("b").unwrap();
    assert_eq!(unsafe { elimpar_orbit(g, tuple.as_ptr(), &mut size, &mut formula) }, ElimparStatus::Ok);
    assert!(formula.is_null());
    unsafe { elimpar_groupoid_free(g) };
}

#[test]
fn errors_are_reported_per_thread() {
    let mut g = ptr::null_mut();
    let bad = CString::new("{ not json").unwrap();
    assert_eq!(unsafe { elimpar_groupoid_from_json(bad.as_ptr(), &mut g) }, ElimparStatus::Parse);
    assert!(g.is_null());
    assert!(last_error().contains("json"));
    assert_eq!(unsafe { elimpar_groupoid_from_json(ptr::null(), &mut g) }, ElimparStatus::NullArgument);
    assert!(last_error().contains("json"));
    std::thread::spawn(|| assert!(elimpar_last_error().is_null())).join().unwrap();

    let g = load("gf4.json");
    let mut size = 0usize;
    let mut formula = ptr::null_mut();
    let tuple = CString::new("nope").unwrap();
    assert_eq!(
        unsafe { elimpar_orbit(g, tuple.as_ptr(), &mut size, &mut formula) },
        ElimparStatus::UnknownParameter
    );
    assert!(last_error().contains("nope"));
    let mut n = 0usize;
    assert_eq!(unsafe { elimpar_groupoid_object_count(g, &mut n) }, ElimparStatus::Ok);
    assert!(elimpar_last_error().is_null());
    unsafe { elimpar_groupoid_free(g) };
    unsafe { elimpar_groupoid_free(ptr::null_mut()) };
    unsafe { elimpar_string_free(ptr::null_mut()) };
}

#[test]
fn etale_completion_round_trips_through_json() {
    let g = load("gf4_identity.json");
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { elimpar_groupoid_etale_completion(g, &mut c) }, ElimparStatus::Ok);
    let mut arrows = 0usize;
    assert_eq!(unsafe { elimpar_groupoid_arrow_count(c, &mut arrows) }, ElimparStatus::Ok);
    assert_eq!(arrows, 2);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { elimpar_groupoid_to_json(c, &mut json) }, ElimparStatus::Ok);
    let text = CString::new(unsafe { take(json) }).unwrap();
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { elimpar_groupoid_from_json(text.as_ptr(), &mut again) }, ElimparStatus::Ok);
    unsafe {
        elimpar_groupoid_free(again);
        elimpar_groupoid_free(c);
        elimpar_groupoid_free(g);
    }
}

#[test]
fn theories_parse_check_and_synthesize() {
    let mut t = ptr::null_mut();
    let text = data("decidable.theory");
    assert_eq!(unsafe { elimpar_theory_parse(text.as_ptr(), &mut t) }, ElimparStatus::Ok);
    let mut n = 0usize;
    assert_eq!(unsafe { elimpar_theory_axiom_count(t, &mut n) }, ElimparStatus::Ok);
    assert_eq!(n, 3);
    let g = load("subsets.json");
    let mut yes = false;
    assert_eq!(unsafe { elimpar_is_conservative(g, t, 3, 2, &mut yes) }, ElimparStatus::Ok);
    assert!(yes);

    let bad = CString::new("sort V\naxiom [x] true => P(x)").unwrap();
    let mut t2 = ptr::null_mut();
    assert_ne!(unsafe { elimpar_theory_parse(bad.as_ptr(), &mut t2) }, ElimparStatus::Ok);
    assert!(t2.is_null());

    let tb = load("two_block.json");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { elimpar_synthesize_theory(tb, 1, &mut s) }, ElimparStatus::Ok);
    let mut printed = ptr::null_mut();
    assert_eq!(unsafe { elimpar_theory_to_string(s, &mut printed) }, ElimparStatus::Ok);
    assert!(unsafe { take(printed) }.contains("U1(x) & U2(x) => false"));
    unsafe {
        elimpar_theory_free(s);
        elimpar_groupoid_free(tb);
        elimpar_groupoid_free(g);
        elimpar_theory_free(t);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(elimpar_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api_and_compiles() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/elimpar.h")).unwrap();
    for name in [
        "elimpar_groupoid_from_json",
        "elimpar_orbit",
        "elimpar_last_error",
        "ELIMPAR_STATUS_CAP_EXCEEDED",
        "typedef struct ElimparGroupoid ElimparGroupoid",
    ] {
        assert!(header.contains(name), "{name}");
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"elimpar.h\"\nint main(void) { ElimparGroupoid *g = 0; size_t n = 0; \
         return elimpar_groupoid_object_count(g, &n) == ELIMPAR_STATUS_OK; }\n",
    )
    .unwrap();
    let Ok(status) = std::process::Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&src)
        .status()
    else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(status.success());
}
