//! Singularity analysis of the prescribed workspace.
//!
//! Type-1 singularities (a leg folds or unfolds) are located as sign
//! changes of the inverse geometric discriminants. Type-2 singularities are
//! excluded by certifying, with interval arithmetic, that the Kantorovich
//! condition holds for the forward geometric model everywhere on the image
//! of the workspace in joint space.
//!
//! Both analyses fix the bearing at a representative value: the geometry of
//! a coaxial manipulator is invariant under bearing.

mod kantorovich;
mod type1;
mod workspace;

pub use kantorovich::{
    certify_point, certify_workspace, certify_workspace_with, kantorovich_test,
    kantorovich_test_box, CellCertificate, CertificationFailure, CertificationReport,
    CertifyOptions, KantorovichCertificate, MAX_SUBDIVISION_DEPTH,
};
pub use type1::{
    annotate_certification, scan_type1, scan_type1_against, type1_discriminants, ScanCell,
    ScanResult,
};
pub use workspace::WorkspaceBox;
