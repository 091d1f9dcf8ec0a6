//! JSON model-file format and its conversion into a validated tree.

use nalgebra::Rotation3;
use serde::{Deserialize, Serialize};
use spatial::{spatial_inertia, Mat3, SpatialTransform, Vec3};

use crate::joint::JointModel;
use crate::tree::{ContactPoint, KinematicTree, ModelError};

fn default_gravity() -> [f64; 3] {
    [0.0, 0.0, -9.81]
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ModelFile {
    pub name: String,
    #[serde(default = "default_gravity")]
    pub gravity: [f64; 3],
    pub joints: Vec<JointEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub contacts: Vec<ContactEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct JointEntry {
    pub id: usize,
    pub parent: usize,
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<[f64; 3]>,
    pub placement: PlacementEntry,
    pub inertia: InertiaEntry,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PlacementEntry {
    pub xyz: [f64; 3],
    pub rpy: [f64; 3],
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InertiaEntry {
    pub mass: f64,
    pub com: [f64; 3],
    /// Rotational inertia about the com, packed [Ixx, Iyy, Izz, Ixy, Ixz, Iyz].
    #[serde(rename = "I")]
    pub i: [f64; 6],
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ContactEntry {
    pub body: usize,
    pub point: [f64; 3],
}

/// Intrinsic X-Y-Z rotation applied in that order.
fn rpy_matrix(rpy: &[f64; 3]) -> Mat3 {
    let rx = Rotation3::from_axis_angle(&Vec3::x_axis(), rpy[0]);
    let ry = Rotation3::from_axis_angle(&Vec3::y_axis(), rpy[1]);
    let rz = Rotation3::from_axis_angle(&Vec3::z_axis(), rpy[2]);
    *(rx * ry * rz).matrix()
}

fn icom_matrix(packed: &[f64; 6]) -> Mat3 {
    let [ixx, iyy, izz, ixy, ixz, iyz] = *packed;
    Mat3::new(ixx, ixy, ixz, ixy, iyy, iyz, ixz, iyz, izz)
}

fn check_axis(id: usize, kind: &str, axis: Option<[f64; 3]>) -> Result<Vec3, ModelError> {
    let a = axis.ok_or_else(|| ModelError::MissingAxis { id, kind: kind.to_string() })?;
    let v = Vec3::new(a[0], a[1], a[2]);
    if !v.iter().all(|x| x.is_finite()) {
        return Err(ModelError::NonFinite { id, what: "axis".into() });
    }
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(ModelError::NonUnitAxis { id, norm });
    }
    Ok(v / norm)
}

impl ModelFile {
    pub fn into_tree(&self) -> Result<KinematicTree, ModelError> {
        let n = self.joints.len();
        if n == 0 {
            return Err(ModelError::Empty);
        }
        let mut joints = Vec::with_capacity(n);
        let mut parent = Vec::with_capacity(n);
        let mut placement = Vec::with_capacity(n);
        let mut inertia = Vec::with_capacity(n);

        for (pos, e) in self.joints.iter().enumerate() {
            if e.id != pos + 1 {
                return Err(ModelError::BadId { expected: pos + 1, found: e.id });
            }
            if e.parent > pos {
                return Err(ModelError::BadParent { id: e.id, parent: e.parent });
            }
            let joint = match e.kind.as_str() {
                "revolute" => JointModel::Revolute { axis: check_axis(e.id, "revolute", e.axis)? },
                "prismatic" => {
                    JointModel::Prismatic { axis: check_axis(e.id, "prismatic", e.axis)? }
                }
                "spherical" => JointModel::Spherical,
                "free" => JointModel::Free,
                other => {
                    return Err(ModelError::UnknownKind { id: e.id, found: other.to_string() })
                }
            };

            let xyz = Vec3::from(e.placement.xyz);
            if !xyz.iter().chain(e.placement.rpy.iter()).all(|x| x.is_finite()) {
                return Err(ModelError::NonFinite { id: e.id, what: "placement".into() });
            }

            let com = Vec3::from(e.inertia.com);
            let icom = icom_matrix(&e.inertia.i);
            if !e.inertia.mass.is_finite()
                || !com.iter().all(|x| x.is_finite())
                || !icom.iter().all(|x| x.is_finite())
            {
                return Err(ModelError::NonFinite { id: e.id, what: "inertia".into() });
            }
            if e.inertia.mass < 0.0 {
                return Err(ModelError::NonPsdInertia {
                    id: e.id,
                    detail: format!("mass {} < 0", e.inertia.mass),
                });
            }
            let min_eig = icom.symmetric_eigenvalues().min();
            if min_eig < -1e-9 {
                return Err(ModelError::NonPsdInertia {
                    id: e.id,
                    detail: format!("rotational inertia min eigenvalue {min_eig:.3e}"),
                });
            }

            joints.push(joint);
            parent.push(if e.parent == 0 { None } else { Some(e.parent - 1) });
            placement.push(SpatialTransform::from_pose(&rpy_matrix(&e.placement.rpy), &xyz));
            inertia.push(spatial_inertia(e.inertia.mass, &com, &icom));
        }

        let contacts = self
            .contacts
            .iter()
            .enumerate()
            .map(|(index, c)| {
                if c.body == 0 || c.body > n {
                    Err(ModelError::BadContactBody { index, body: c.body, n })
                } else {
                    Ok(ContactPoint { body: c.body - 1, point: Vec3::from(c.point) })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;

        KinematicTree::new(
            self.name.clone(),
            Vec3::from(self.gravity),
            joints,
            parent,
            placement,
            inertia,
            contacts,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model file serialization cannot fail")
    }
}

/// Parses a JSON model file into a validated tree.
pub fn parse_model(text: &str) -> Result<KinematicTree, ModelError> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| ModelError::Syntax {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    file.into_tree()
}
