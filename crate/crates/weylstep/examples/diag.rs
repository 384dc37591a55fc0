// Scratch diagnostics; not part of the library surface.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use weylstep::grid::PeriodicGrid;
use weylstep::propagator::{consistency_sweep, convergence_sweep_multi, ConvergenceOptions};
use weylstep::symbols::{exp_of_sampled, sample, SymbolFunction, TrigTerm};
use weylstep::weyl::{norm_estimate_lenient, quantize, ComposedOp, DiffOp, LinOp, NormOptions};

fn curved() -> SymbolFunction {
    let terms = vec![
        TrigTerm::new(C64::new(1.0, 0.0), vec![0], vec![2]),
        TrigTerm::new(C64::new(0.25, 0.0), vec![1], vec![2]),
        TrigTerm::new(C64::new(0.25, 0.0), vec![-1], vec![2]),
        TrigTerm::new(C64::new(0.5, 0.0), vec![1], vec![1]),
        TrigTerm::new(C64::new(-0.5, 0.0), vec![-1], vec![1]),
    ];
    SymbolFunction::trig_poly(2.0, terms).with_ellipticity(0.45, 1.0)
}

fn norm_opts() -> NormOptions {
    NormOptions::default()
}

fn frob(m: &Array2<C64>) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn cons_scan(points: usize, ks: std::ops::RangeInclusive<i32>) {
    let grid = PeriodicGrid::unit(1, points).unwrap();
    let sym = curved();
    let t = 0.3;
    println!("grid {points}:");
    for k in ks {
        let h = 2f64.powi(-k);
        let q_now = sample(&sym, t, &grid).unwrap();
        let q_next = sample(&sym, t + h, &grid).unwrap();
        let p = exp_of_sampled(&q_now, h);
        let left = ComposedOp::new(vec![
            Arc::new(quantize(&q_next)) as Arc<dyn LinOp>,
            Arc::new(quantize(&p)),
        ])
        .unwrap();
        let right = quantize(&q_now.mul(&p).unwrap());
        let ldense = left.dense();
        let rdense = right.dense();
        let fro = frob(&(&ldense - &rdense));
        let defect = DiffOp::new(Arc::new(left), Arc::new(right)).unwrap();
        let (val, conv) = norm_estimate_lenient(&defect, 0.0, -2.0, &norm_opts());
        println!("  h=2^-{k}: op-norm {val:.6e} (conv {conv}) frob {fro:.6e} ratio/h {:.4}", val / h);
    }
}

fn main() {
    let mode = std::env::args().nth(1).unwrap_or_else(|| "cons".into());
    match mode.as_str() {
        "cons" => {
            for points in [16usize, 32, 64] {
                cons_scan(points, 1..=9);
            }
        }
        "sweep" => {
            let grid = PeriodicGrid::unit(1, 32).unwrap();
            let hs: Vec<f64> = (1..=4).map(|k| 2f64.powi(-k)).collect();
            let sweep = consistency_sweep(&curved(), 0.3, 0.0, &hs, &grid, &norm_opts()).unwrap();
            for r in &sweep.rows {
                println!("h {:.5} defect {:.6e} conv {}", r.h, r.defect, r.converged);
            }
            println!("slope {:.4}", sweep.fit.slope);
        }
        "conv" => {
            let grid = PeriodicGrid::unit(1, 32).unwrap();
            let a = SymbolFunction::multiplier(2.0, |xi| C64::new(xi[0] * xi[0], 0.0))
                .with_ellipticity(0.9, 1.0);
            let b = SymbolFunction::multiplier(0.0, |_| C64::new(0.25, 0.0));
            let sym = SymbolFunction::lacunary_family(a, b, 0.5, 0.5, 6);
            let opts = ConvergenceOptions { tol: 1e-7, dense_rows: 4, ..Default::default() };
            let sweeps = convergence_sweep_multi(
                &sym,
                0.5,
                0.0,
                &[0.0, 0.5],
                &[4, 8, 16, 32],
                None,
                &grid,
                &opts,
            )
            .unwrap();
            for sweep in &sweeps {
                println!("r = {}", sweep.r);
                for row in &sweep.rows {
                    println!(
                        "  N {:3} op {:.6e} time {:.6e} final {:.6e}",
                        row.n_steps, row.err_op, row.err_time, row.err_final
                    );
                }
                println!(
                    "  op slope {:?} time slope {:?}",
                    sweep.fit_op.as_ref().map(|f| f.slope),
                    sweep.fit_time.as_ref().map(|f| f.slope)
                );
            }
        }
        other => eprintln!("unknown mode {other}"),
    }
}
