use std::io::Write;
use std::process::{Command, Output, Stdio};

fn fpi(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fpi"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn fpi");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn script(contents: &str) -> tempfile_path::Path {
    tempfile_path::Path::new(contents)
}

/// Minimal self-deleting script file.
mod tempfile_path {
    use std::sync::atomic::{AtomicUsize, Ordering};

    static NEXT: AtomicUsize = AtomicUsize::new(0);

    pub struct Path(pub std::path::PathBuf);

    impl Path {
        pub fn new(contents: &str) -> Self {
            let n = NEXT.fetch_add(1, Ordering::Relaxed);
            let path =
                std::env::temp_dir().join(format!("fpi-script-{}-{n}.txt", std::process::id()));
            std::fs::write(&path, contents).unwrap();
            Path(path)
        }

        pub fn as_str(&self) -> &str {
            self.0.to_str().unwrap()
        }
    }

    impl Drop for Path {
        fn drop(&mut self) {
            let _ = std::fs::remove_file(&self.0);
        }
    }
}

#[test]
fn stdin_session() {
    let out = fpi(
        &["--p", "2", "--vars", "2"],
        "eval root(x1,1)*root(x1,1)\nlevel root(x1,2)\n",
    );
    assert!(out.status.success());
    assert_eq!(stdout(&out), "x1\n2\n");
}

#[test]
fn perfect_check_output() {
    let out = fpi(&[], "fq perfect-check 3 3\n");
    assert_eq!(
        stdout(&out),
        "pass: Frobenius bijective on 27 elements, order 3\n"
    );
}

#[test]
fn script_mode_is_deterministic_and_stops_on_error() {
    let s = script("let a = root(x1,1) + x2\nfrob a 1\neval 1/(x1 - x1)\neval x1\n");
    let first = fpi(&["--p", "3", "--script", s.as_str()], "");
    let second = fpi(&["--p", "3", "--script", s.as_str()], "");
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stderr, second.stderr);
    assert_eq!(first.status.code(), Some(1));
    assert_eq!(stdout(&first), "a = root(x2,1)^3 + root(x1,1)\nx2^3 + x1\n");
    assert!(String::from_utf8_lossy(&first.stderr).contains("line 3"));

    let kept = fpi(&["--p", "3", "--keep-going", "--script", s.as_str()], "");
    assert_eq!(kept.status.code(), Some(1));
    assert!(stdout(&kept).ends_with("x1\n"));
}

#[test]
fn exit_codes() {
    let parse = script("eval x1 +\n");
    assert_eq!(
        fpi(&["--script", parse.as_str()], "").status.code(),
        Some(2)
    );
    let unknown = script("frobnicate 1\n");
    assert_eq!(
        fpi(&["--script", unknown.as_str()], "").status.code(),
        Some(2)
    );
    assert_eq!(fpi(&["--p", "4"], "").status.code(), Some(2));
    let level0 = script("eval root(x1,1)\n");
    let out = fpi(&["--mode", "level0", "--script", level0.as_str()], "");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("level 0"));
}

#[test]
fn json_mode() {
    let out = fpi(&["--json"], "eval root(x1,1)\neval x9\n");
    let lines: Vec<serde_json::Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["schema"], 1);
    assert_eq!(lines[0]["level"], 1);
    assert_eq!(lines[0]["num"], serde_json::json!([[[1, 0], 1]]));
    assert_eq!(lines[1]["kind"], "error");
    assert_eq!(lines[1]["code"], 2);
    assert_eq!(lines[1]["offset"], 5);
}
