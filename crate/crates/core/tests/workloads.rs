use fixposit::format::{validate, SWEEP_WIDTHS};
use fixposit::workloads::trace::{trace_sample, OperandTrace};
use fixposit::workloads::{run_workload, run_workload_full, Substitution, Workload, WorkloadParams};
use fixposit::PositFormat;

fn fixed(n: u32) -> Substitution {
    Substitution::Fixed(validate(n, 6, 2).unwrap())
}

#[test]
fn multiplication_counts_match_reference_runs() {
    for w in Workload::ALL {
        let p = WorkloadParams::new(24, 5);
        let a = run_workload(w, Substitution::Reference, &p, None).unwrap();
        let b = run_workload(w, fixed(18), &p, None).unwrap();
        assert_eq!(a.multiplications, b.multiplications, "{w}");
        assert!(a.multiplications > 0);
    }
}

#[test]
fn thirty_two_bit_substitution_is_lossless_at_small_size() {
    for w in Workload::ALL {
        let r = run_workload_full(w, fixed(32), &WorkloadParams::new(40, 8), None).unwrap();
        assert_eq!(r.reference, r.output, "{w}");
    }
}

#[test]
fn loss_shrinks_with_width() {
    for w in [Workload::Gemm, Workload::Fft, Workload::Blackscholes, Workload::Sobel] {
        let p = WorkloadParams::new(48, 2);
        let losses: Vec<f64> =
            SWEEP_WIDTHS.iter().map(|&n| run_workload(w, fixed(n), &p, None).unwrap().quality_loss()).collect();
        assert!(losses.windows(2).all(|x| x[1] <= x[0]), "{w}: {losses:?}");
    }
}

#[test]
fn posit_substitution_matches_fixed_inside_shared_range() {
    // all kernel values sit well inside 2^-64 .. 2^63
    let p = WorkloadParams::new(32, 4);
    let posit = Substitution::Posit(PositFormat::new(24, 6).unwrap());
    for w in [Workload::Gemm, Workload::Dot, Workload::Axpby] {
        let a = run_workload_full(w, posit, &p, None).unwrap();
        let b = run_workload_full(w, fixed(24), &p, None).unwrap();
        assert_eq!(a.output, b.output, "{w}");
    }
}

#[test]
fn trace_captures_every_product_and_samples_chunks() {
    let mut t = OperandTrace::new();
    let r = run_workload(Workload::Gemm, fixed(20), &WorkloadParams::new(30, 1), Some(&mut t)).unwrap();
    assert_eq!(t.len() as u64, r.multiplications);
    let s = trace_sample(&t, 10, 1000, 9).unwrap();
    assert_eq!(s.len(), 10_000);
    let mut bytes = Vec::new();
    t.write_to(&mut bytes).unwrap();
    assert_eq!(bytes.len(), 8 * t.len());
    assert_eq!(OperandTrace::read_from(bytes.as_slice()).unwrap(), t);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    use rayon::prelude::*;
    let p = WorkloadParams::new(32, 77);
    let serial: Vec<f64> = Workload::ALL.iter().map(|&w| run_workload(w, fixed(22), &p, None).unwrap().quality).collect();
    let parallel: Vec<f64> =
        Workload::ALL.par_iter().map(|&w| run_workload(w, fixed(22), &p, None).unwrap().quality).collect();
    assert_eq!(serial, parallel);
}
