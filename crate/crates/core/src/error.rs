use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError { line, col, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PositionError {
    #[error("unknown anchor `@{0}`")]
    UnknownAnchor(String),
    #[error("no method named `{0}`")]
    UnknownMethod(String),
    #[error("line {0} is not inside any method body")]
    LineOutside(usize),
    #[error("cannot move {dir} from slot {slot} of a block with {len} statements")]
    Navigation { dir: &'static str, slot: usize, len: usize },
    #[error("position does not resolve in the current program")]
    Dangling,
    #[error("position `@{0}` needs a match site to be resolved against")]
    NoContext(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TacticError {
    #[error("syntax error: {0}")]
    Syntax(#[from] ParseError),
    #[error("in `{def}`: right-hand side uses unbound metavariable ?{var}")]
    UnboundRhsVariable { def: String, var: String },
    #[error("recursive tactic definitions: {}", .0.join(" -> "))]
    RecursionCycle(Vec<String>),
    #[error("undefined tactic `{0}`")]
    UndefinedTactic(String),
    #[error("tactic `{0}` is defined twice")]
    DuplicateDefinition(String),
    #[error("tactic `{name}` has duplicate formal `{formal}`")]
    DuplicateFormal { name: String, formal: String },
    #[error("tactic `{name}` expects {expected} argument(s), got {got}")]
    Arity { name: String, expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("unbound metavariable ?{0}")]
    UnboundVariable(String),
    #[error("malformed pattern: {0}")]
    MalformedPattern(String),
    #[error("rewriting did not terminate within {0} steps")]
    Divergence(usize),
    #[error("no applicable site for rule")]
    NoApplicableSite,
    #[error(transparent)]
    Position(#[from] PositionError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("fixture line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("fixture line {line}: selector `{selector}` {problem}")]
    Selector { line: usize, selector: String, problem: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Tactic(#[from] TacticError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("recursive application of `{0}`")]
    Recursion(String),
    #[error("search gave up after {0} steps")]
    Budget(usize),
    #[error("no way to apply the tactic: {0}")]
    Exhausted(String),
}
