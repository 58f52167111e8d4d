//! Cartesian impedance controller: restoring force from the pose/velocity
//! error and online re-orientation of the stiffness/damping ellipsoids
//! toward the current motion direction.

use serde::{Deserialize, Serialize};

use crate::math::{
    build_basis, ellipsoid_matrix, Basis3, MathError, StiffnessParams, SymMat3, Vec3,
    EPS_NORM,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileMode {
    /// Isotropic stiffness k_max on all axes.
    HighConstant,
    /// Isotropic stiffness k_min on all axes.
    LowConstant,
    /// Ellipsoid with the major axis tracking the motion direction.
    SelfTuning,
}

impl ProfileMode {
    pub fn label(self) -> &'static str {
        match self {
            ProfileMode::HighConstant => "high",
            ProfileMode::LowConstant => "low",
            ProfileMode::SelfTuning => "selftuning",
        }
    }
}

/// Stiffness and damping matrices plus the scalars that generate them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpedanceProfile {
    pub stiffness: SymMat3,
    pub damping: SymMat3,
    pub params: StiffnessParams,
    pub mode: ProfileMode,
    basis: Basis3,
}

/// Pose/velocity pairs fed to the controller each step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerInput {
    pub x_d: Vec3,
    pub x_a: Vec3,
    pub v_d: Vec3,
    pub v_a: Vec3,
}

impl ImpedanceProfile {
    pub fn new(mode: ProfileMode, params: StiffnessParams) -> Result<Self, MathError> {
        params.validate()?;
        let basis = Basis3::IDENTITY;
        let (stiffness, damping) = match mode {
            ProfileMode::HighConstant => (
                SymMat3::isotropic(params.k_max),
                SymMat3::isotropic(params.d_max()),
            ),
            ProfileMode::LowConstant => (
                SymMat3::isotropic(params.k_min),
                SymMat3::isotropic(params.d_min()),
            ),
            ProfileMode::SelfTuning => (
                ellipsoid_matrix(&basis, params.k_max, params.k_min)?,
                ellipsoid_matrix(&basis, params.d_max(), params.d_min())?,
            ),
        };
        Ok(ImpedanceProfile {
            stiffness,
            damping,
            params,
            mode,
            basis,
        })
    }

    /// F_c = K_c (x_d - x_a) + D_c (v_d - v_a).
    pub fn cartesian_force(&self, input: &ControllerInput) -> Vec3 {
        self.stiffness.mul_vec(input.x_d - input.x_a)
            + self.damping.mul_vec(input.v_d - input.v_a)
    }

    /// Re-orients the stiffness and damping ellipsoids so the major axis
    /// follows `motion_direction`. Constant modes and degenerate directions
    /// leave the profile unchanged.
    pub fn self_tune(&mut self, motion_direction: Vec3) {
        if self.mode != ProfileMode::SelfTuning {
            return;
        }
        if motion_direction.norm() <= EPS_NORM {
            return;
        }
        let basis = build_basis(motion_direction, self.basis);
        // unwrap is fine: params were validated at construction
        self.stiffness = ellipsoid_matrix(&basis, self.params.k_max, self.params.k_min).unwrap();
        self.damping = ellipsoid_matrix(&basis, self.params.d_max(), self.params.d_min()).unwrap();
        self.basis = basis;
    }

    /// Direction of the current stiffness major axis.
    pub fn major_axis(&self) -> Vec3 {
        self.basis.u1
    }
}

/// Selects the motion direction fed to `self_tune`: the planner's latest
/// desired-pose increment when it is non-degenerate, otherwise the previous
/// direction is held.
pub fn tuning_direction(planner_increment: Vec3, previous: Vec3) -> Vec3 {
    if planner_increment.norm() > EPS_NORM {
        planner_increment
    } else {
        previous
    }
}
