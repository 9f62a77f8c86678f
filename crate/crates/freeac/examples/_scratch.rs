use freeac::instance::{generate, GenParams};
use freeac::tol::Tolerances;
use freeac::verify::{run_suite, Suite};

fn main() {
    let t = Tolerances::default();
    let mut worst: Vec<(String, f64, f64)> = Vec::new();
    let t0 = std::time::Instant::now();
    let mut fails = 0;
    for (d, m, deg, trunc) in [(1usize, 1usize, 1usize, 5usize), (1, 2, 2, 4), (2, 1, 1, 5), (2, 2, 2, 4), (3, 1, 1, 3), (3, 2, 1, 3), (2, 3, 1, 3), (2, 1, 2, 6)] {
        for seed in [1u64, 2, 3] {
            let params = GenParams { d, m, deg, rho: 0.85, seed, trunc };
            let inst = generate(&params, "free").unwrap();
            match run_suite(&inst, Suite::All, &t, seed) {
                Ok(checks) => {
                    for c in checks {
                        if !c.pass {
                            println!("FAIL free d={d} m={m} deg={deg} N={trunc} seed={seed}: {} {:.3e} vs {:.3e}", c.name, c.max_error, c.tolerance);
                            fails += 1;
                        }
                        let margin = c.max_error / c.tolerance.max(1e-300);
                        if let Some(w) = worst.iter_mut().find(|w| w.0 == c.name) {
                            if margin > w.1 { w.1 = margin; w.2 = c.max_error; }
                        } else {
                            worst.push((c.name.clone(), margin, c.max_error));
                        }
                    }
                }
                Err(e) => { println!("ERR free d={d} m={m} deg={deg} N={trunc} seed={seed}: {e}"); fails += 1; }
            }
        }
    }
    for (d, m, deg, trunc) in [(2usize, 1usize, 2usize, 4usize), (2, 2, 1, 4), (3, 1, 1, 3), (1, 1, 2, 5)] {
        for seed in [4u64, 5] {
            let params = GenParams { d, m, deg, rho: 0.8, seed, trunc };
            let inst = generate(&params, "comm").unwrap();
            match run_suite(&inst, Suite::All, &t, seed) {
                Ok(checks) => {
                    for c in checks {
                        if !c.pass {
                            println!("FAIL comm d={d} m={m} deg={deg} N={trunc} seed={seed}: {} {:.3e} vs {:.3e}", c.name, c.max_error, c.tolerance);
                            fails += 1;
                        }
                        let margin = c.max_error / c.tolerance.max(1e-300);
                        if let Some(w) = worst.iter_mut().find(|w| w.0 == c.name) {
                            if margin > w.1 { w.1 = margin; w.2 = c.max_error; }
                        } else {
                            worst.push((c.name.clone(), margin, c.max_error));
                        }
                    }
                }
                Err(e) => { println!("ERR comm d={d} m={m} deg={deg} N={trunc} seed={seed}: {e}"); fails += 1; }
            }
        }
    }
    println!("total failures: {fails}, elapsed {:?}", t0.elapsed());
    worst.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("tightest margins (err/tol) excluding lower-bound style:");
    for (name, margin, err) in worst.iter().take(14) {
        println!("  {name:44} {margin:.3e} (err {err:.3e})");
    }
}
