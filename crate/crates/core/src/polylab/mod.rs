//! The polymorphism lab: operations, multisets, Lipschitz constants,
//! universal instances and pp-definitions.

pub mod enumerate;
pub mod fractional;
pub mod multiset;
pub mod operation;
pub mod pp;
pub mod universal;

pub use enumerate::enumerate_symmetric_polymorphisms;
pub use fractional::{lipschitz_analysis, lipschitz_constant, FractionalOperation, LipschitzAnalysis};
pub use multiset::{dist, multisets, num_multisets, Multiset};
pub use operation::{
    classify_operation, is_polymorphism, Classification, GeneralOperation, Operation, SymmetricOperation,
};
pub use pp::{check_nu_gadget, pp_evaluate, Atom, AtomRelation, PPFormula};
pub use universal::{min_c_bound, universal_instance, CBound};
