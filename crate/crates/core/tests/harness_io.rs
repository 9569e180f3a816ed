//! CSV export and import of sweep and timing tables.

use graddens::harness::{
    export_sweep, export_timing, import_sweep, import_timing, SweepResult, TimingTable,
};
use graddens::Error;

fn sweep(taus: Vec<f64>, errors: Vec<f64>) -> SweepResult {
    SweepResult {
        function_name: "sinusoid".into(),
        n: 1 << 12,
        taus,
        errors,
        failures: Vec::new(),
    }
}

#[test]
fn sweep_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let r = sweep(
        vec![3e-4, 1e-4, 1e-5],
        vec![0.38, 0.1876099381032787, f64::NAN],
    );
    export_sweep(&r, &path).unwrap();
    let (taus, errors) = import_sweep(&path).unwrap();
    assert_eq!(taus, r.taus);
    assert_eq!(&errors[..2], &r.errors[..2]);
    assert!(errors[2].is_nan());
}

#[test]
fn empty_sweep_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    export_sweep(&sweep(vec![], vec![]), &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "tau,l1_error\n");
    assert_eq!(import_sweep(&path).unwrap(), (vec![], vec![]));
}

#[test]
fn timing_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("timing.csv");
    let t = TimingTable {
        ns: vec![1024, 2048],
        wave_seconds: vec![1.25e-5, 2.6e-5],
        charfunc_seconds: vec![3.1e-3, 1.2e-2],
        repetitions: 5,
    };
    export_timing(&t, &path).unwrap();
    let back = import_timing(&path).unwrap();
    assert_eq!(back.ns, t.ns);
    assert_eq!(back.wave_seconds, t.wave_seconds);
    assert_eq!(back.charfunc_seconds, t.charfunc_seconds);
}

#[test]
fn unwritable_path_is_an_io_error_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("no").join("such").join("sweep.csv");
    let err = export_sweep(&sweep(vec![1e-4], vec![0.1]), &path).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains(path.to_str().unwrap()));
}

#[test]
fn wrong_header_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    std::fs::write(&path, "tau,error\n1e-4,0.1\n").unwrap();
    assert!(matches!(import_sweep(&path), Err(Error::Csv { .. })));
}
