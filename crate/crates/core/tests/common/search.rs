use std::time::{Duration, Instant};

use dtac_core::engine::{Engine, NoErrors};
use dtac_core::kernel::Env;
use dtac_core::gen::{invocation, Gen};
use dtac_core::guard::check_guard;
use dtac_core::printer::print_program;
use dtac_core::projection::compiled_projection;
use dtac_core::stdlib::load_stdlib;
use dtac_core::tactic::parse_invocation;
use dtac_core::typecheck::typecheck;
use rand::Rng;

pub struct Stats {
    pub trials: usize,
    pub accepted: usize,
    pub raw_accepted: usize,
    pub rejected: usize,
    pub elapsed: Duration,
}

/// Runs random tactic sequences and checks every accepted result against
/// the guard and the compiled projection of the starting program.
pub fn random_sequences(trials: usize, seed: u64) -> Result<Stats, String> {
    let lib = load_stdlib().map_err(|e| e.to_string())?.library;
    let engine = Engine::new(&lib);
    let mut g = Gen::new(seed);
    let start = Instant::now();
    let (mut accepted, mut rejected, mut raw_accepted) = (0, 0, 0);
    for i in 0..trials {
        let initial = g.program();
        let code = print_program(&compiled_projection(&initial));
        let mut p = initial.clone();
        let n = g.rng().gen_range(1..=4);
        for _ in 0..n {
            let text = invocation(&mut g, &p);
            let t = parse_invocation(&text).map_err(|e| format!("trial {i}: `{text}`: {e}"))?;
            // the raw search result, before the engine's own guard filter,
            // must already respect the guard
            if let Ok(raw) = engine.eval(&Env::new(), &p, &t) {
                let r = check_guard(&p, &raw.program);
                if !r.ok() {
                    return Err(format!("trial {i}: `{text}` produced {r}"));
                }
                raw_accepted += 1;
            }
            let Ok(out) = engine.run(&p, &t, &NoErrors) else {
                rejected += 1;
                continue;
            };
            accepted += 1;
            let step = check_guard(&p, &out.program);
            if !step.ok() {
                return Err(format!("trial {i}: `{text}` accepted but {step}"));
            }
            if !typecheck(&out.program).is_empty() {
                return Err(format!("trial {i}: `{text}` accepted an ill-typed program"));
            }
            let now = print_program(&compiled_projection(&out.program));
            if now != code {
                return Err(format!("trial {i}: `{text}` changed compiled code:\n{code}\n---\n{now}"));
            }
            p = out.program;
        }
        let total = check_guard(&initial, &p);
        if !total.ok() {
            return Err(format!("trial {i}: sequence {total}"));
        }
    }
    Ok(Stats { trials, accepted, raw_accepted, rejected, elapsed: start.elapsed() })
}
