//! OWL 2 QL profile validation.
//!
//! The concrete syntax only admits QL constructs plus the `ConditionalType`
//! rule, so the check reduces to flagging every rule axiom. The report keeps
//! a code per finding so further violation classes can be added without
//! changing the surface.

use std::fmt;

use crate::model::{Axiom, Ontology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationCode {
    NonQlConditionalType,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationCode::NonQlConditionalType => f.write_str("NON_QL_CONDITIONAL_TYPE"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub axiom_index: usize,
    pub code: ViolationCode,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileReport {
    pub conformant: bool,
    pub violations: Vec<Violation>,
}

pub fn validate_ql_profile(o: &Ontology) -> ProfileReport {
    let mut violations = Vec::new();
    for (idx, ax) in o.tbox.iter().enumerate() {
        if let Axiom::ConditionalType { head_class, .. } = ax {
            violations.push(Violation {
                axiom_index: idx,
                code: ViolationCode::NonQlConditionalType,
                message: format!(
                    "ConditionalType rule deriving `{head_class}` is outside the QL profile"
                ),
            });
        }
    }
    ProfileReport { conformant: violations.is_empty(), violations }
}
