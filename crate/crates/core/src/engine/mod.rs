//! Evaluation of tactics: match phase, application phase, sequencing,
//! choice and unfolding, realised as a depth-first backtracking search.

mod prop;
mod subst;

use std::cell::{Cell, RefCell};
use std::collections::BTreeMap;
use std::fmt;

use crate::ast::{Expr, Program};
use crate::error::{EngineError, KernelError, TacticError};
use crate::guard::check_guard;
use crate::kernel::{apply, instantiate_partial, pmatch, shift_positions, Binding, Env, Site, CONTEXT_VARS};
use crate::pattern::{expr_vars, Pattern};
use crate::position::{resolve, PosRef, Position};
use crate::tactic::{Body, Inst, Library, Prop, Trans};
use crate::typecheck::typecheck;

pub use prop::prop_holds;
use subst::Subst;

pub const DEFAULT_BUDGET: usize = 200_000;

/// One primitive step that contributed to a result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    /// Innermost named tactic the step belongs to.
    pub tactic: String,
    pub site: Position,
    pub summary: String,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.tactic, self.site, self.summary)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOutcome {
    pub env: Env,
    pub program: Program,
    pub trace: Vec<TraceStep>,
}

/// Source of starting environments: one per reported verifier failure.
pub trait ErrorSource {
    fn error_envs(&self, p: &Program) -> Vec<Env>;
}

/// A verifier that never reports anything.
pub struct NoErrors;

impl ErrorSource for NoErrors {
    fn error_envs(&self, _: &Program) -> Vec<Env> {
        Vec::new()
    }
}

#[derive(Clone)]
struct State {
    env: Env,
    prog: Program,
    trace: Vec<TraceStep>,
}

type Snapshot = BTreeMap<String, Position>;

/// Instantiation handed down from calls to the first primitive step.
#[derive(Clone, Default)]
struct Pending {
    binds: BTreeMap<String, Binding>,
    /// Each entry must be satisfied; within one, any position will do.
    positions: Vec<(Vec<PosRef>, Snapshot)>,
}

type Outcome = Result<Option<EvalOutcome>, EngineError>;
type Cont<'a> = &'a mut dyn FnMut(State) -> Outcome;

pub struct Engine<'l> {
    lib: &'l Library,
    budget: usize,
    steps: Cell<usize>,
    /// Failure seen after the most primitive steps, for diagnostics.
    deepest: RefCell<Option<(usize, String)>>,
}

fn ground(e: &Expr) -> Result<(), KernelError> {
    let mut vs = std::collections::BTreeSet::new();
    expr_vars(e, &mut vs);
    match vs.into_iter().next() {
        Some(v) => Err(KernelError::UnboundVariable(v)),
        None => Ok(()),
    }
}

/// Evaluates an inst list's bindings under `env`.
pub fn instantiate_inst(inst: &Inst, env: &Env) -> Result<BTreeMap<String, Binding>, KernelError> {
    let mut out = BTreeMap::new();
    for (v, e) in inst.bindings() {
        let b = match e {
            Expr::Meta(x) => env.vars.get(x).cloned().ok_or_else(|| KernelError::UnboundVariable(x.clone()))?,
            _ => {
                let e = instantiate_partial(e, &env.vars)?;
                ground(&e)?;
                Binding::Expr(e)
            }
        };
        out.insert(v.clone(), b);
    }
    Ok(out)
}

impl<'l> Engine<'l> {
    pub fn new(lib: &'l Library) -> Self {
        Engine { lib, budget: DEFAULT_BUDGET, steps: Cell::new(0), deepest: RefCell::new(None) }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    fn fail(&self, depth: usize, msg: impl Into<String>) {
        let mut d = self.deepest.borrow_mut();
        if d.as_ref().is_none_or(|(k, _)| depth > *k) {
            *d = Some((depth, msg.into()));
        }
    }

    fn exhausted(&self) -> EngineError {
        let msg = self.deepest.borrow().as_ref().map(|(_, m)| m.clone()).unwrap_or_else(|| "no candidates".into());
        EngineError::Exhausted(msg)
    }

    fn reset(&self) {
        self.steps.set(0);
        *self.deepest.borrow_mut() = None;
    }

    /// First successful evaluation of `t` from `env`, without the top-level
    /// well-formedness checks.
    pub fn eval(&self, env: &Env, p: &Program, t: &Trans) -> Result<EvalOutcome, EngineError> {
        self.reset();
        let st = State { env: env.clone(), prog: p.clone(), trace: Vec::new() };
        let mut k = |st: State| Ok(Some(EvalOutcome { env: st.env, program: st.prog, trace: st.trace }));
        self.go(t, st, &Pending::default(), &[], &mut k)?.ok_or_else(|| self.exhausted())
    }

    /// Runs `t` from each starting environment the verifier offers, keeping
    /// the first result that typechecks and passes the guard.
    pub fn run(&self, p: &Program, t: &Trans, errors: &dyn ErrorSource) -> Result<EvalOutcome, EngineError> {
        self.reset();
        let mut starts = errors.error_envs(p);
        if starts.is_empty() {
            starts.push(Env::new());
        }
        for env in starts {
            let st = State { env, prog: p.clone(), trace: Vec::new() };
            let mut k = |st: State| -> Outcome {
                let depth = st.trace.len() + 1;
                let errs = typecheck(&st.prog);
                if let Some(e) = errs.first() {
                    self.fail(depth, format!("result does not typecheck: {e}"));
                    return Ok(None);
                }
                let g = check_guard(p, &st.prog);
                if !g.ok() {
                    let v = &g.violations[0];
                    self.fail(depth, format!("guard rejected the result: {:?} in {}: {}", v.kind, v.method, v.detail));
                    return Ok(None);
                }
                Ok(Some(EvalOutcome { env: st.env, program: st.prog, trace: st.trace }))
            };
            if let Some(o) = self.go(t, st, &Pending::default(), &[], &mut k)? {
                return Ok(o);
            }
        }
        Err(self.exhausted())
    }

    fn go(&self, t: &Trans, st: State, pending: &Pending, stack: &[String], k: Cont) -> Outcome {
        match t {
            Trans::Seq(a, b) => {
                let mut next = |st2: State| self.go(b, st2, &Pending::default(), stack, &mut *k);
                self.go(a, st, pending, stack, &mut next)
            }
            Trans::Or(a, b) => {
                if let Some(o) = self.go(a, st.clone(), pending, stack, &mut *k)? {
                    return Ok(Some(o));
                }
                self.go(b, st, pending, stack, k)
            }
            Trans::Call { name, args, inst } => self.call(name, args, inst, st, pending, stack, k),
            Trans::Rule { .. } | Trans::Match { .. } => self.primitive(t, None, st, pending, stack, k),
        }
    }

    /// The body of `name` with formals replaced by the arguments.
    pub fn unfold(&self, name: &str, args: &[Expr], env: &Env) -> Result<Body, EngineError> {
        let def = self.lib.get(name).ok_or_else(|| TacticError::UndefinedTactic(name.to_string()))?;
        if def.formals.len() != args.len() {
            return Err(TacticError::Arity { name: name.to_string(), expected: def.formals.len(), got: args.len() }
                .into());
        }
        let mut map = BTreeMap::new();
        for (f, a) in def.formals.iter().zip(args) {
            map.insert(f.clone(), instantiate_partial(a, &env.vars)?);
        }
        let mut body = def.body.clone();
        Subst { map: &map }.body(&mut body);
        Ok(body)
    }

    #[allow(clippy::too_many_arguments)]
    fn call(
        &self,
        name: &str,
        args: &[Expr],
        inst: &Inst,
        st: State,
        pending: &Pending,
        stack: &[String],
        k: Cont,
    ) -> Outcome {
        if stack.iter().any(|s| s == name) {
            return Err(EngineError::Recursion(name.to_string()));
        }
        let depth = st.trace.len();
        let body = match self.unfold(name, args, &st.env) {
            Ok(b) => b,
            Err(EngineError::Kernel(e)) => {
                self.fail(depth, format!("{name}: arguments: {e}"));
                return Ok(None);
            }
            Err(e) => return Err(e),
        };
        let mut pending = pending.clone();
        match instantiate_inst(inst, &st.env) {
            Ok(binds) => {
                for (v, b) in binds {
                    if pending.binds.get(&v).is_some_and(|old| !old.same(&b)) {
                        self.fail(depth, format!("{name}: conflicting bindings for ?{v}"));
                        return Ok(None);
                    }
                    pending.binds.insert(v, b);
                }
            }
            Err(e) => {
                self.fail(depth, format!("{name}: instantiation: {e}"));
                return Ok(None);
            }
        }
        let refs: Vec<PosRef> = inst.positions().cloned().collect();
        if !refs.is_empty() {
            pending.positions.push((refs, st.env.positions.clone()));
        }
        let mut stack = stack.to_vec();
        stack.push(name.to_string());
        match &body {
            Body::Plain(t) => self.go(t, st, &pending, &stack, k),
            Body::When(p, t @ (Trans::Rule { .. } | Trans::Match { .. })) => {
                self.primitive(t, Some(p), st, &pending, &stack, k)
            }
            Body::When(p, t) => {
                let envs = prop_holds(&st.env, &st.prog, p);
                if envs.is_empty() {
                    self.fail(depth, format!("{name}: `{p}` does not hold"));
                }
                for env in envs {
                    let st2 = State { env, ..st.clone() };
                    if let Some(o) = self.go(t, st2, &pending, &stack, &mut *k)? {
                        return Ok(Some(o));
                    }
                }
                Ok(None)
            }
        }
    }

    fn admitted(&self, prog: &Program, m: &Env, positions: &[(Vec<PosRef>, Snapshot)]) -> bool {
        let (Some(site), Some(region)) = (&m.site, m.positions.get("m")) else { return false };
        positions.iter().all(|(refs, snap)| {
            refs.iter().any(|r| {
                resolve(prog, snap, r, Some(site.method())).is_ok_and(|q| q.admits(region))
            })
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn primitive(
        &self,
        t: &Trans,
        prop: Option<&Prop>,
        st: State,
        pending: &Pending,
        stack: &[String],
        k: Cont,
    ) -> Outcome {
        let (pat, rhs, inst): (&Pattern, Option<&Pattern>, &Inst) = match t {
            Trans::Rule { lhs, rhs, inst } => (lhs, Some(rhs), inst),
            Trans::Match { pat, inst } => (pat, None, inst),
            _ => unreachable!("primitive called on a combinator"),
        };
        let depth = st.trace.len();
        let tactic = stack.last().cloned().unwrap_or_else(|| if rhs.is_some() { "rule" } else { "match" }.into());
        let mut base = st.env.flush();
        for v in CONTEXT_VARS {
            base.vars.remove(*v);
        }
        let mut binds = pending.binds.clone();
        match instantiate_inst(inst, &st.env) {
            Ok(own) => {
                for (v, b) in own {
                    if binds.get(&v).is_some_and(|old| !old.same(&b)) {
                        self.fail(depth, format!("{tactic}: conflicting bindings for ?{v}"));
                        return Ok(None);
                    }
                    binds.insert(v, b);
                }
            }
            Err(e) => {
                self.fail(depth, format!("{tactic}: instantiation: {e}"));
                return Ok(None);
            }
        }
        for (v, b) in binds {
            if base.vars.get(&v).is_some_and(|old| !old.same(&b)) {
                self.fail(depth, format!("{tactic}: ?{v} is already bound differently"));
                return Ok(None);
            }
            base.vars.insert(v, b);
        }
        let mut positions = pending.positions.clone();
        let refs: Vec<PosRef> = inst.positions().cloned().collect();
        if !refs.is_empty() {
            positions.push((refs, st.env.positions.clone()));
        }
        let matches = pmatch(&base, &st.prog, pat)?;
        let mut admitted = 0;
        let mut applied_any = false;
        for m in matches {
            let n = self.steps.get() + 1;
            if n > self.budget {
                return Err(EngineError::Budget(self.budget));
            }
            self.steps.set(n);
            if !self.admitted(&st.prog, &m, &positions) {
                continue;
            }
            admitted += 1;
            let envs = match prop {
                Some(p) => prop_holds(&m, &st.prog, p),
                None => vec![m],
            };
            for m in envs {
                let site_pos = m.positions["m"].clone();
                let next = match rhs {
                    Some(rhs) => match apply(&m, &st.prog, rhs) {
                        Ok(a) => {
                            let site = m.site.clone().expect("pmatch records sites");
                            let mut env = m;
                            if let Site::Stmts { .. } = site {
                                shift_positions(&mut env, &site, a.pos.end - a.pos.start);
                            }
                            env.site = None;
                            env.captures.clear();
                            for (key, q) in [("pos", &a.pos), ("m", &a.pos), ("start", &a.start), ("s", &a.start)] {
                                env.positions.insert(key.into(), q.clone());
                            }
                            env.positions.insert("end".into(), a.end.clone());
                            env.positions.insert("e".into(), a.end);
                            let summary = format!("rewrote {site_pos}");
                            (env, a.program, summary)
                        }
                        Err(e) => {
                            self.fail(depth, format!("{tactic}: cannot apply at {site_pos}: {e}"));
                            continue;
                        }
                    },
                    None => {
                        let mut env = m;
                        env.site = None;
                        env.captures.clear();
                        for (to, from) in [("pos", "m"), ("start", "s"), ("end", "e")] {
                            let q = env.positions[from].clone();
                            env.positions.insert(to.into(), q);
                        }
                        (env, st.prog.clone(), format!("matched {site_pos}"))
                    }
                };
                applied_any = true;
                let mut trace = st.trace.clone();
                trace.push(TraceStep { tactic: tactic.clone(), site: site_pos, summary: next.2 });
                if let Some(o) = k(State { env: next.0, prog: next.1, trace })? {
                    return Ok(Some(o));
                }
            }
        }
        if admitted == 0 {
            self.fail(depth, format!("{tactic}: no site matches `{}`", crate::printer::print_pattern(pat)));
        } else if !applied_any {
            if let Some(p) = prop {
                self.fail(depth, format!("{tactic}: `{p}` fails at every matching site"));
            }
        }
        Ok(None)
    }
}
