use std::fs;

use conormal_cli::commands::cmd_star;
use conormal_cli::{parse_variety, Record, RunConfig, Session};

fn session(dir: Option<&std::path::Path>) -> Session {
    Session::new(RunConfig { cache_dir: dir.map(Into::into), ..RunConfig::default() }).unwrap()
}

fn star(s: &Session, text: &str) -> Record {
    let report = cmd_star(s, &parse_variety(text, 3).unwrap(), 4);
    assert_eq!(report.exit_code, 0);
    report.records[0].deterministic_view()
}

fn entries(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "bin"))
        .collect();
    v.sort();
    v
}

const INSTANCES: [&str; 2] = ["veronese:2,2", "tetragonal:2,2,1,b=1,2"];

#[test]
fn hits_reproduce_uncached_results() {
    let dir = tempfile::tempdir().unwrap();
    let plain: Vec<Record> = INSTANCES.iter().map(|t| star(&session(None), t)).collect();

    let first = session(Some(dir.path()));
    let cold: Vec<Record> = INSTANCES.iter().map(|t| star(&first, t)).collect();
    let (hits, misses) = first.cache.as_ref().unwrap().stats();
    assert_eq!(hits, 0);
    assert!(misses > 0);
    assert!(!entries(dir.path()).is_empty());

    let second = session(Some(dir.path()));
    let warm: Vec<Record> = INSTANCES.iter().map(|t| star(&second, t)).collect();
    let (hits, misses) = second.cache.as_ref().unwrap().stats();
    assert_eq!(misses, 0);
    assert_eq!(hits as usize, entries(dir.path()).len());

    assert_eq!(plain, cold);
    assert_eq!(plain, warm);
}

#[test]
fn corrupt_entries_are_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let s = session(Some(dir.path()));
    let want = star(&s, "tetragonal:2,2,1,b=1,2");
    let files = entries(dir.path());
    assert!(files.len() >= 3);

    // A flipped payload byte, a truncated file and a foreign entry under
    // another key's name must all be rejected.
    let mut bytes = fs::read(&files[0]).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x5a;
    fs::write(&files[0], bytes).unwrap();
    let len = fs::metadata(&files[1]).unwrap().len();
    fs::OpenOptions::new().write(true).open(&files[1]).unwrap().set_len(len / 3).unwrap();
    fs::copy(&files[0], &files[2]).unwrap();

    let again = session(Some(dir.path()));
    assert_eq!(star(&again, "tetragonal:2,2,1,b=1,2"), want);
    let (_, misses) = again.cache.as_ref().unwrap().stats();
    assert_eq!(misses, 3);

    let healed = session(Some(dir.path()));
    assert_eq!(star(&healed, "tetragonal:2,2,1,b=1,2"), want);
    assert_eq!(healed.cache.as_ref().unwrap().stats().1, 0);
}

#[test]
fn keys_separate_primes_and_seeds() {
    let dir = tempfile::tempdir().unwrap();
    star(&session(Some(dir.path())), "veronese:1,4");
    let n = entries(dir.path()).len();
    let other = Session::new(RunConfig {
        cache_dir: Some(dir.path().into()),
        prime: 1073741783,
        retry_primes: vec![1073741789],
        ..RunConfig::default()
    })
    .unwrap();
    cmd_star(&other, &parse_variety("veronese:1,4", 3).unwrap(), 4);
    // Only the degree-2 pieces are shared: the nonzero value there is
    // confirmed under the other prime in both runs.
    assert_eq!(other.cache.as_ref().unwrap().stats().0, 2);
    assert!(entries(dir.path()).len() > n);

    let reseeded = Session::new(RunConfig { cache_dir: Some(dir.path().into()), seed: 5, ..RunConfig::default() }).unwrap();
    cmd_star(&reseeded, &parse_variety("veronese:1,4", 3).unwrap(), 4);
    assert_eq!(reseeded.cache.as_ref().unwrap().stats().0, 0);
}
