use std::fmt;

use super::ast::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticCode {
    // syntax
    EmptyScript,
    ExpectedContextHeader,
    UnterminatedContext,
    MissingArrow,
    EmptyPattern,
    EmptyAlternation,
    SingleBranchAlternation,
    AlternationTooDeep,
    UnbalancedBrace,
    ExpectedResponse,
    UnterminatedResponse,
    EmptyResponse,
    BadCapture,
    UnknownAction,
    BadGotoArity,
    EmptyRuleSet,
    BadPragma,
    // semantic
    DuplicateContext,
    UnknownDefaultContext,
    UnknownGotoTarget,
    CaptureOutOfRange,
    // lint
    RuleOrdering,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::EmptyScript => "EmptyScript",
            Self::ExpectedContextHeader => "ExpectedContextHeader",
            Self::UnterminatedContext => "UnterminatedContext",
            Self::MissingArrow => "MissingArrow",
            Self::EmptyPattern => "EmptyPattern",
            Self::EmptyAlternation => "EmptyAlternation",
            Self::SingleBranchAlternation => "SingleBranchAlternation",
            Self::AlternationTooDeep => "AlternationTooDeep",
            Self::UnbalancedBrace => "UnbalancedBrace",
            Self::ExpectedResponse => "ExpectedResponse",
            Self::UnterminatedResponse => "UnterminatedResponse",
            Self::EmptyResponse => "EmptyResponse",
            Self::BadCapture => "BadCapture",
            Self::UnknownAction => "UnknownAction",
            Self::BadGotoArity => "BadGotoArity",
            Self::EmptyRuleSet => "EmptyRuleSet",
            Self::BadPragma => "BadPragma",
            Self::DuplicateContext => "DuplicateContext",
            Self::UnknownDefaultContext => "UnknownDefaultContext",
            Self::UnknownGotoTarget => "UnknownGotoTarget",
            Self::CaptureOutOfRange => "CaptureOutOfRange",
            Self::RuleOrdering => "RuleOrdering",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagnosticCode,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(code: DiagnosticCode, span: Span, message: impl Into<String>) -> Self {
        Self { severity: Severity::Error, code, message: message.into(), span }
    }

    pub fn warning(code: DiagnosticCode, span: Span, message: impl Into<String>) -> Self {
        Self { severity: Severity::Warning, code, message: message.into(), span }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}[{}]: {}", self.span.line, self.span.column, self.severity, self.code, self.message)
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
