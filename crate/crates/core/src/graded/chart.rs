use std::collections::HashMap;
use std::sync::Arc;

use super::GradedError;

/// One coordinate of a chart. The sign rules only look at `degree`; the
/// optional bidegree is carried along for display.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedCoordinate {
    pub name: String,
    pub degree: u32,
    pub bidegree: Option<(u32, u32)>,
}

impl GradedCoordinate {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        GradedCoordinate {
            name: name.into(),
            degree,
            bidegree: None,
        }
    }

    pub fn with_bidegree(mut self, base: u32, shift: u32) -> Self {
        self.bidegree = Some((base, shift));
        self
    }

    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// Degree-0 coordinate: index into the scalar ring's variables.
    Base(usize),
    /// Positive-degree coordinate: slot in a monomial exponent vector.
    Slot(usize),
}

/// Ordered graded coordinate system. Declaration order is the canonical
/// monomial order.
#[derive(Debug, PartialEq, Eq)]
pub struct Chart {
    coords: Vec<GradedCoordinate>,
    roles: Vec<Role>,
    base: Vec<usize>,
    slots: Vec<usize>,
    by_name: HashMap<String, usize>,
}

impl Chart {
    pub fn new(coords: Vec<GradedCoordinate>) -> Result<Arc<Chart>, GradedError> {
        let mut by_name = HashMap::new();
        let mut roles = Vec::with_capacity(coords.len());
        let mut base = Vec::new();
        let mut slots = Vec::new();
        for (i, c) in coords.iter().enumerate() {
            if by_name.insert(c.name.clone(), i).is_some() {
                return Err(GradedError::DuplicateCoordinate(c.name.clone()));
            }
            if c.degree == 0 {
                roles.push(Role::Base(base.len()));
                base.push(i);
            } else {
                roles.push(Role::Slot(slots.len()));
                slots.push(i);
            }
        }
        Ok(Arc::new(Chart {
            coords,
            roles,
            base,
            slots,
            by_name,
        }))
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coordinates(&self) -> &[GradedCoordinate] {
        &self.coords
    }

    pub fn coordinate(&self, i: usize) -> &GradedCoordinate {
        &self.coords[i]
    }

    pub fn role(&self, i: usize) -> Role {
        self.roles[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn lookup(&self, name: &str) -> Result<usize, GradedError> {
        self.index_of(name)
            .ok_or_else(|| GradedError::UnknownCoordinate(name.to_string()))
    }

    pub fn base_count(&self) -> usize {
        self.base.len()
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    /// Coordinate index of base variable `v`.
    pub fn base_coordinate(&self, v: usize) -> usize {
        self.base[v]
    }

    pub fn slot_coordinate(&self, s: usize) -> usize {
        self.slots[s]
    }

    pub fn slot_degree(&self, s: usize) -> u32 {
        self.coords[self.slots[s]].degree
    }

    pub fn slot_is_odd(&self, s: usize) -> bool {
        self.slot_degree(s) % 2 == 1
    }

    pub fn base_name(&self, v: usize) -> &str {
        &self.coords[self.base[v]].name
    }

    pub fn base_var_index(&self, name: &str) -> Option<usize> {
        match self.index_of(name).map(|i| self.roles[i]) {
            Some(Role::Base(v)) => Some(v),
            _ => None,
        }
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.coords[i].degree
    }

    /// Charts are compatible when they are the same allocation or have the
    /// same coordinates.
    pub fn same(a: &Arc<Chart>, b: &Arc<Chart>) -> bool {
        Arc::ptr_eq(a, b) || a.coords == b.coords
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roles_follow_degrees() {
        let c = Chart::new(vec![
            GradedCoordinate::new("x1", 0),
            GradedCoordinate::new("th1", 1),
            GradedCoordinate::new("x2", 0),
            GradedCoordinate::new("psi1", 2),
        ])
        .unwrap();
        assert_eq!(c.role(2), Role::Base(1));
        assert_eq!(c.role(3), Role::Slot(1));
        assert!(c.slot_is_odd(0));
        assert!(!c.slot_is_odd(1));
        assert_eq!(c.base_var_index("x2"), Some(1));
    }

    #[test]
    fn duplicate_names_rejected() {
        let r = Chart::new(vec![GradedCoordinate::new("x", 0), GradedCoordinate::new("x", 1)]);
        assert!(r.is_err());
    }
}
