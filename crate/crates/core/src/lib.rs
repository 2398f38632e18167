//! Central quadrilaterals: radial triangle centers of a quadrilateral, their shapes,
//! and a scanner that rediscovers which (type, radiator, center) combinations give special shapes.

pub mod centers;
pub mod classify;
pub mod conditions;
pub mod discovery;
pub mod formula;
pub mod geom;
pub mod quads;
pub mod radiators;
