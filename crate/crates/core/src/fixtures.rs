//! Example tensors A, B and C.
//!
//! A and C are positive semi-definite with equal trace 6. B carries the
//! principal coordinate system of A and the eigenvalues of C, so A and B
//! commute while A and C do not.

use crate::tensor::{eig_sym3, SymTensor3};

pub const TENSOR_A: SymTensor3 = SymTensor3::new(2.0, 2.5, 1.5, 0.5, -0.5, -0.5);

pub const TENSOR_C: SymTensor3 = SymTensor3::new(1.0, 2.0, 3.0, 0.5, 1.5, 0.0);

/// Published two-decimal rendering of B (row-major).
pub const TENSOR_B_PRINTED: [[f64; 3]; 3] = [[2.19, 0.55, -1.11], [0.55, 3.02, -0.83], [-1.11, -0.83, 0.79]];

/// `v_A · diag(ρ_C) · v_Aᵀ` with both spectra in descending order.
pub fn tensor_b() -> SymTensor3 {
    let a = eig_sym3(&TENSOR_A);
    let c = eig_sym3(&TENSOR_C);
    SymTensor3::from_eigen(c.values, &a.vectors)
}

#[derive(Debug, Clone, Copy)]
pub struct FixtureTensors {
    pub a: SymTensor3,
    pub b: SymTensor3,
    pub c: SymTensor3,
}

pub fn fixture_tensors() -> FixtureTensors {
    FixtureTensors { a: TENSOR_A, b: tensor_b(), c: TENSOR_C }
}
