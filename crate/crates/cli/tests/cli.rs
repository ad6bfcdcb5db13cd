use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fmtree::FmIndex;
use tempfile::TempDir;

fn fmtree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fmtree"))
        .args(args)
        .output()
        .expect("failed to spawn fmtree")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn reference_index(dir: &Path, sampling: &str) -> PathBuf {
    let text = write(dir, "ref.fa", ">ref\nACGTAACCA\n");
    let index = dir.join(format!("ref.{sampling}.idx"));
    let o = fmtree(&[
        "build",
        "--input", text.to_str().unwrap(),
        "--format", "fasta",
        "--output", index.to_str().unwrap(),
        "-D", "3",
        "--sampling", sampling,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    index
}

fn random_text(n: usize) -> String {
    let mut x = 0x9e37_79b9_7f4a_7c15u64;
    (0..n)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            b"ACGT"[(x >> 62) as usize] as char
        })
        .collect()
}

#[test]
fn build_writes_expected_samples() {
    let dir = TempDir::new().unwrap();
    let index = FmIndex::load(reference_index(dir.path(), "value")).unwrap();
    assert_eq!(index.samples().values().to_vec(), vec![9, 0, 6, 3]);

    let index = FmIndex::load(reference_index(dir.path(), "subscript")).unwrap();
    assert_eq!(index.samples().values().to_vec(), vec![9, 5, 6, 3]);
}

#[test]
fn build_rejects_distance_one() {
    let dir = TempDir::new().unwrap();
    let text = write(dir.path(), "t.txt", "acgt\n");
    let out = dir.path().join("t.idx");
    let o = fmtree(&["build", "--input", text.to_str().unwrap(), "--output", out.to_str().unwrap(), "-D", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn build_reports_missing_input() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("t.idx");
    let missing = dir.path().join("missing.txt");
    let o = fmtree(&["build", "--input", missing.to_str().unwrap(), "--output", out.to_str().unwrap(), "-D", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.txt"));
}

#[test]
fn locate_prints_sorted_positions() {
    let dir = TempDir::new().unwrap();
    let index = reference_index(dir.path(), "value");
    let patterns = write(dir.path(), "p.txt", "ac\ngg\na\nACG\n");
    for engine in ["fmtree", "original"] {
        let o = fmtree(&[
            "locate",
            "--index", index.to_str().unwrap(),
            "--patterns", patterns.to_str().unwrap(),
            "--engine", engine,
        ]);
        assert!(o.status.success());
        assert_eq!(stdout(&o), "ac\t2\t0 5\ngg\t0\t\na\t4\t0 4 5 8\nACG\t1\t0\n");
    }
}

#[test]
fn locate_continues_past_bad_lines() {
    let dir = TempDir::new().unwrap();
    let index = reference_index(dir.path(), "value");
    let patterns = write(dir.path(), "p.txt", "ac\nanx\ngg\n");
    let o = fmtree(&["locate", "--index", index.to_str().unwrap(), "--patterns", patterns.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "ac\t2\t0 5\ngg\t0\t\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn locate_fmtree_needs_value_sampling() {
    let dir = TempDir::new().unwrap();
    let index = reference_index(dir.path(), "subscript");
    let patterns = write(dir.path(), "p.txt", "ac\n");
    let o = fmtree(&["locate", "--index", index.to_str().unwrap(), "--patterns", patterns.to_str().unwrap(), "--engine", "fmtree"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("value sampling"));

    let o = fmtree(&["locate", "--index", index.to_str().unwrap(), "--patterns", patterns.to_str().unwrap(), "--engine", "original"]);
    assert_eq!(stdout(&o), "ac\t2\t0 5\n");
}

#[test]
fn locate_output_is_identical_across_engines_and_threads() {
    let dir = TempDir::new().unwrap();
    let text = write(dir.path(), "t.txt", &random_text(20_000));
    let index = dir.path().join("t.idx");
    let o = fmtree(&["build", "--input", text.to_str().unwrap(), "--output", index.to_str().unwrap(), "-D", "5"]);
    assert!(o.status.success());
    let pats: String = ["a", "acg", "ttga", "cccc", "gattaca", "acgtacgtacgtacgt"]
        .iter()
        .map(|p| format!("{p}\n"))
        .collect();
    let patterns = write(dir.path(), "p.txt", &pats);
    let args = |engine: &'static str, threads: &'static str| {
        let o = fmtree(&[
            "locate",
            "--index", index.to_str().unwrap(),
            "--patterns", patterns.to_str().unwrap(),
            "--engine", engine,
            "--threads", threads,
        ]);
        assert!(o.status.success());
        o.stdout
    };
    let base = args("original", "1");
    assert_eq!(args("fmtree", "1"), base);
    assert_eq!(args("fmtree", "4"), base);
    assert_eq!(args("original", "3"), base);
}

#[test]
fn bench_emits_one_row_per_configuration() {
    let dir = TempDir::new().unwrap();
    let text = write(dir.path(), "t.txt", &random_text(30_000));
    let run = |csv: &Path| {
        let o = fmtree(&[
            "bench",
            "--text", text.to_str().unwrap(),
            "--pattern-lengths", "5",
            "--patterns-per-length", "10",
            "--D-list", "2,3,4,5,6,7,8",
            "--engines", "fmtree,original_v,original_s",
            "--seed", "11",
            "--csv", csv.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let mut reader = csv::Reader::from_path(csv).unwrap();
        reader
            .records()
            .map(|r| r.unwrap().iter().map(str::to_owned).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    };
    let a = run(&dir.path().join("a.csv"));
    let b = run(&dir.path().join("b.csv"));
    assert_eq!(a.len(), 21);
    for engine in ["fmtree", "original_v", "original_s"] {
        assert_eq!(a.iter().filter(|r| r[0] == engine).count(), 7);
    }
    for (x, y) in a.iter().zip(&b) {
        // Everything but the two timing columns.
        assert_eq!(x[..5], y[..5]);
        assert_eq!(x[7..], y[7..]);
        let bytes: f64 = x[7].parse().unwrap();
        let bpc: f64 = x[8].parse().unwrap();
        assert!((bpc - 8.0 * bytes / 30_001.0).abs() < 1e-9);
    }
}

#[test]
fn bench_rejects_unknown_engine() {
    let dir = TempDir::new().unwrap();
    let text = write(dir.path(), "t.txt", "acgtacgt\n");
    let o = fmtree(&["bench", "--text", text.to_str().unwrap(), "--engines", "lz"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn selftest_passes_and_catches_injected_fault() {
    let o = fmtree(&["selftest", "--max-n", "300", "--iterations", "20", "--seed", "3"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("passed"));

    let o = fmtree(&["selftest", "--max-n", "300", "--iterations", "20", "--seed", "3", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(3));
    let report = stdout(&o);
    for field in ["text:", "pattern:", "D:", "engine:"] {
        assert!(report.contains(field), "{report}");
    }
}

#[test]
fn selftest_rejects_zero_max_n() {
    let o = fmtree(&["selftest", "--max-n", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(fmtree(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(fmtree(&["build", "--input", "x"]).status.code(), Some(1));
    assert_eq!(fmtree(&["--help"]).status.code(), Some(0));
}
