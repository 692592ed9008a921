//! Golden-file runner shared by the golden and acceptance targets.
//!
//! File layout: a JSON argv line, then `exit: N`, then `--- stdout` and `--- stderr`
//! sections. `QMOYAL_BLESS=1` rewrites the expected sections from the current output.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

pub struct GoldenRun {
    pub cases: usize,
    pub failures: Vec<String>,
}

fn render(code: i32, stdout: &str, stderr: &str) -> String {
    format!("exit: {code}\n--- stdout\n{stdout}--- stderr\n{stderr}")
}

fn run(args: &[String]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_qmoyal")).args(args).output().unwrap();
    render(
        out.status.code().unwrap_or(-1),
        &String::from_utf8_lossy(&out.stdout),
        &String::from_utf8_lossy(&out.stderr),
    )
}

fn golden_files() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "golden"))
        .collect();
    v.sort();
    v
}

pub fn run_golden(bless: bool) -> GoldenRun {
    let paths = golden_files();
    let mut failures = Vec::new();
    for path in &paths {
        let text = fs::read_to_string(path).unwrap();
        let (first, expected) = text.split_once('\n').unwrap_or((&text, ""));
        let args: Vec<String> =
            serde_json::from_str(first).unwrap_or_else(|e| panic!("{}: bad argv line: {e}", path.display()));
        let got = run(&args);
        if got == expected {
            continue;
        }
        if bless {
            fs::write(path, format!("{first}\n{got}")).unwrap();
        } else {
            failures.push(format!("{}\n-- expected\n{expected}-- got\n{got}", path.display()));
        }
    }
    GoldenRun { cases: paths.len(), failures }
}
