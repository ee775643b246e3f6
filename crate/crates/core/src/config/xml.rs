//! Strict element/attribute walker over a parsed XML document.

use std::fmt;
use std::str::FromStr;

use roxmltree::{Document, Node};
use thiserror::Error;

use super::expr::{ExprError, Expression};

/// Where in a configuration file an error was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    /// Slash-separated element path, e.g. `cfsSimulation/sequenceStep`.
    pub path: String,
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (line {}, column {})", self.path, self.line, self.column)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("XML syntax error at line {line}, column {column}: {message}")]
    Syntax { line: u32, column: u32, message: String },
    #[error("{location}: {message}")]
    Schema { location: Location, message: String },
    #[error("{location}: unsupported analysis `{kind}`; available: {}", .available.join(", "))]
    UnsupportedAnalysis {
        location: Location,
        kind: String,
        available: Vec<&'static str>,
    },
    #[error("{location}: unsupported PDE `{name}`; only `acoustic` is available")]
    UnsupportedPde { location: Location, name: String },
    #[error("{location}: attribute `{attribute}`: expression error {source}")]
    Expression {
        location: Location,
        attribute: String,
        #[source]
        source: ExprError,
    },
    #[error("{location}: material `{material}`: {message}")]
    Material {
        location: Location,
        material: String,
        message: String,
    },
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ConfigError {
    /// Human-readable location: path plus line/column, or file path for I/O.
    pub fn location(&self) -> String {
        match self {
            ConfigError::Syntax { line, column, .. } => format!("line {line}, column {column}"),
            ConfigError::Schema { location, .. }
            | ConfigError::UnsupportedAnalysis { location, .. }
            | ConfigError::UnsupportedPde { location, .. }
            | ConfigError::Material { location, .. } => location.to_string(),
            ConfigError::Expression { location, source, .. } => {
                format!("{location}, character {}", source.offset)
            }
            ConfigError::Io { path, .. } => path.clone(),
        }
    }
}

pub(crate) fn parse_document(text: &str) -> Result<Document<'_>, ConfigError> {
    Document::parse(text).map_err(|e| {
        let pos = e.pos();
        ConfigError::Syntax {
            line: pos.row,
            column: pos.col,
            message: e.to_string(),
        }
    })
}

/// An element together with its path, checked against a fixed set of
/// attributes and child elements.
#[derive(Clone, Copy)]
pub(crate) struct Element<'a, 'input> {
    pub node: Node<'a, 'input>,
    doc: &'a Document<'input>,
}

pub(crate) struct Scope<'a, 'input> {
    pub el: Element<'a, 'input>,
    pub path: String,
}

impl<'a, 'input> Scope<'a, 'input> {
    pub fn root(doc: &'a Document<'input>) -> Self {
        let node = doc.root_element();
        Scope {
            el: Element { node, doc },
            path: node.tag_name().name().to_string(),
        }
    }

    pub fn name(&self) -> &'a str {
        self.el.node.tag_name().name()
    }

    pub fn location(&self) -> Location {
        let pos = self.el.doc.text_pos_at(self.el.node.range().start);
        Location {
            path: self.path.clone(),
            line: pos.row,
            column: pos.col,
        }
    }

    pub fn error(&self, message: impl Into<String>) -> ConfigError {
        ConfigError::Schema {
            location: self.location(),
            message: message.into(),
        }
    }

    /// Rejects attributes outside `allowed`. Namespaced attributes such as
    /// `xsi:schemaLocation` are ignored.
    pub fn allow_attributes(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        for a in self.el.node.attributes() {
            if a.namespace().is_some() {
                continue;
            }
            if !allowed.contains(&a.name()) {
                let pos = self.el.doc.text_pos_at(a.range().start);
                let expected = if allowed.is_empty() {
                    "no attributes are allowed".to_string()
                } else {
                    format!("allowed: {}", allowed.join(", "))
                };
                return Err(ConfigError::Schema {
                    location: Location {
                        path: format!("{}/@{}", self.path, a.name()),
                        line: pos.row,
                        column: pos.col,
                    },
                    message: format!("unknown attribute `{}` ({expected})", a.name()),
                });
            }
        }
        Ok(())
    }

    /// Child elements, rejecting names outside `allowed` and stray text.
    pub fn children(&self, allowed: &[&str]) -> Result<Vec<Scope<'a, 'input>>, ConfigError> {
        self.collect_children(Some(allowed))
    }

    /// Child elements of any name; stray text is still rejected.
    pub fn any_children(&self) -> Result<Vec<Scope<'a, 'input>>, ConfigError> {
        self.collect_children(None)
    }

    fn collect_children(&self, allowed: Option<&[&str]>) -> Result<Vec<Scope<'a, 'input>>, ConfigError> {
        let mut out = Vec::new();
        for child in self.el.node.children() {
            if child.is_text() {
                if child.text().is_some_and(|t| !t.trim().is_empty()) {
                    let pos = self.el.doc.text_pos_at(child.range().start);
                    return Err(ConfigError::Schema {
                        location: Location {
                            path: self.path.clone(),
                            line: pos.row,
                            column: pos.col,
                        },
                        message: "unexpected text content".into(),
                    });
                }
                continue;
            }
            if !child.is_element() {
                continue;
            }
            let scope = Scope {
                el: Element {
                    node: child,
                    doc: self.el.doc,
                },
                path: format!("{}/{}", self.path, child.tag_name().name()),
            };
            if let Some(allowed) = allowed.filter(|a| !a.contains(&scope.name())) {
                let expected = if allowed.is_empty() {
                    "no child elements are allowed".to_string()
                } else {
                    format!("allowed: {}", allowed.join(", "))
                };
                return Err(scope.error(format!("unknown element `{}` ({expected})", scope.name())));
            }
            out.push(scope);
        }
        Ok(out)
    }

    /// Error for a missing required child element.
    pub fn missing(&self, child: &str) -> ConfigError {
        let mut location = self.location();
        location.path = format!("{}/{child}", self.path);
        ConfigError::Schema {
            location,
            message: format!("missing required element `{child}`"),
        }
    }

    pub fn attr(&self, name: &str) -> Option<&'a str> {
        self.el.node.attribute(name)
    }

    pub fn required_attr(&self, name: &str) -> Result<&'a str, ConfigError> {
        self.attr(name)
            .ok_or_else(|| self.error(format!("missing required attribute `{name}`")))
    }

    pub fn parse_attr<T: FromStr>(&self, name: &str) -> Result<Option<T>, ConfigError> {
        match self.attr(name) {
            None => Ok(None),
            Some(raw) => raw
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| self.error(format!("attribute `{name}`: cannot parse `{raw}`"))),
        }
    }

    pub fn required_parse<T: FromStr>(&self, name: &str) -> Result<T, ConfigError> {
        self.parse_attr(name)?
            .ok_or_else(|| self.error(format!("missing required attribute `{name}`")))
    }

    pub fn expression_attr(&self, name: &str) -> Result<Expression, ConfigError> {
        let raw = self.required_attr(name)?;
        Expression::parse(raw).map_err(|source| ConfigError::Expression {
            location: self.location(),
            attribute: name.to_string(),
            source,
        })
    }

    /// Text content of a leaf element, parsed.
    fn leaf_text<T: FromStr>(&self) -> Result<T, ConfigError> {
        if self.el.node.children().any(|c| c.is_element()) {
            return Err(self.error("expected a value, found child elements"));
        }
        let text: String = self
            .el
            .node
            .children()
            .filter(|c| c.is_text())
            .filter_map(|c| c.text())
            .collect();
        text.trim()
            .parse()
            .map_err(|_| self.error(format!("cannot parse value `{}`", text.trim())))
    }

    /// Value given either as a `value` attribute or as text content.
    pub fn value_or_text<T: FromStr>(&self) -> Result<T, ConfigError> {
        self.allow_attributes(&["value"])?;
        match self.parse_attr::<T>("value")? {
            Some(v) => {
                let content = self
                    .el
                    .node
                    .children()
                    .any(|c| c.is_element() || c.text().is_some_and(|t| !t.trim().is_empty()));
                if content {
                    return Err(self.error("value given both as attribute and as content"));
                }
                Ok(v)
            }
            None => self.leaf_text(),
        }
    }

    /// Text content split at whitespace, each item parsed.
    pub fn text_list<T: FromStr>(&self) -> Result<Vec<T>, ConfigError> {
        self.allow_attributes(&[])?;
        if self.el.node.children().any(|c| c.is_element()) {
            return Err(self.error("expected a list of values, found child elements"));
        }
        let text: String = self.el.node.children().filter_map(|c| c.text()).collect();
        text.split_whitespace()
            .map(|item| {
                item.parse()
                    .map_err(|_| self.error(format!("cannot parse list item `{item}`")))
            })
            .collect()
    }
}

/// At most one child named `name`.
pub(crate) fn single<'s, 'a, 'i>(
    children: &'s [Scope<'a, 'i>],
    name: &str,
) -> Result<Option<&'s Scope<'a, 'i>>, ConfigError> {
    let mut found = children.iter().filter(|c| c.name() == name);
    let first = found.next();
    if let Some(dup) = found.next() {
        return Err(dup.error(format!("element `{name}` may appear only once")));
    }
    Ok(first)
}

/// Exactly one child named `name`.
pub(crate) fn required<'s, 'a, 'i>(
    parent: &Scope<'a, 'i>,
    children: &'s [Scope<'a, 'i>],
    name: &str,
) -> Result<&'s Scope<'a, 'i>, ConfigError> {
    single(children, name)?.ok_or_else(|| parent.missing(name))
}
