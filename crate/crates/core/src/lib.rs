//! Terms, normal forms and string diagrams for free monoidal categories.

pub mod diagram;
pub mod maclane;
pub mod normalize;
pub mod rewrite;
pub mod strictify;
pub mod syntax;
