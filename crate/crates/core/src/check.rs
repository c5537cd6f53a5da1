//! Named pass/fail entries collected by the verifiers.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Offending line, point or parameter when the check fails.
    pub witness: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed: true, detail: detail.into(), witness: None }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>, witness: impl Into<String>) -> Self {
        Self { name: name.into(), passed: false, detail: detail.into(), witness: Some(witness.into()) }
    }

    /// Pass when `witness` is `None`.
    pub fn from_witness(name: impl Into<String>, detail: impl Into<String>, witness: Option<String>) -> Self {
        Self { name: name.into(), passed: witness.is_none(), detail: detail.into(), witness }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
