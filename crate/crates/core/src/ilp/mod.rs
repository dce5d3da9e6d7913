//! The integer programming model: construction, LP text and assignment checks.

mod lp;
mod model;

pub use lp::{emit_lp, LpDocument, LpRow};
pub use model::{
    build_model, check_assignment, induced_assignment, Assignment, Family, Group, IlpModel, Row,
    RowViolation, Sense, VarKey, Variable, WasteTerm,
};
