//! Every example runs to completion.

#[path = "../examples/sequence_constants.rs"]
mod sequence_constants;

#[path = "../examples/catch_times.rs"]
mod catch_times;

#[path = "../examples/oracle_cross_check.rs"]
mod oracle_cross_check;

#[path = "../examples/upper_bound_certificate.rs"]
mod upper_bound_certificate;

#[path = "../examples/lower_bound_refutation.rs"]
mod lower_bound_refutation;

#[path = "../examples/finite_differences.rs"]
mod finite_differences;

#[path = "../examples/unknown_distance.rs"]
mod unknown_distance;

#[path = "../examples/sweep_csv.rs"]
mod sweep_csv;

#[test]
fn sequence_constants_runs() {
    sequence_constants::run_example().unwrap();
}

#[test]
fn catch_times_runs() {
    catch_times::run_example().unwrap();
}

#[test]
fn oracle_cross_check_runs() {
    oracle_cross_check::run_example().unwrap();
}

#[test]
fn upper_bound_certificate_runs() {
    upper_bound_certificate::run_example().unwrap();
}

#[test]
fn lower_bound_refutation_runs() {
    lower_bound_refutation::run_example().unwrap();
}

#[test]
fn finite_differences_runs() {
    finite_differences::run_example().unwrap();
}

#[test]
fn unknown_distance_runs() {
    unknown_distance::run_example().unwrap();
}

#[test]
fn sweep_csv_runs() {
    sweep_csv::run_example().unwrap();
}
