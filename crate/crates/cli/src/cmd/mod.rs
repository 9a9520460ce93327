pub mod jump;
pub mod lattice;
pub mod mechanism;
pub mod mocap;
pub mod pipeline;
pub mod stiffness;
