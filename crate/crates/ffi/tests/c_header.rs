use std::path::{Path, PathBuf};
use std::process::Command;

fn crate_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

/// `target/<profile>`, where cargo leaves `libbjorth_ffi.a`.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

fn cc() -> String {
    std::env::var("CC").unwrap_or_else(|_| "cc".into())
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = crate_dir().join("include/bjorth.h");
    assert!(header.exists(), "build script did not write {}", header.display());
    for lang in ["c", "c++"] {
        let status = Command::new(cc())
            .args(["-fsyntax-only", "-Wall", "-Wextra", "-Werror", "-x", lang])
            .arg(&header)
            .status()
            .expect("C compiler available");
        assert!(status.success(), "header fails as {lang}");
    }
}

#[test]
fn c_program_links_against_static_library() {
    let lib = profile_dir().join("libbjorth_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let out_dir = tempfile::TempDir::new().unwrap();
    let exe = out_dir.path().join("smoke");
    let compile = Command::new(cc())
        .args(["-std=c11", "-Wall", "-Wextra", "-Werror", "-I"])
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .expect("C compiler available");
    assert!(compile.status.success(), "{}", String::from_utf8_lossy(&compile.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
