//! Placeholder
pub struct HierarchyContext;
