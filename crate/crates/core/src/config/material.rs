use std::collections::BTreeMap;
use std::path::Path;

use super::xml::{parse_document, single, ConfigError, Scope};

#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    /// Speed of sound in m/s.
    pub c: f64,
    /// Parsed for completeness; the pressure formulation does not use it.
    pub density: Option<f64>,
}

/// Parses a `cfsMaterialDataBase` document. `speedOfSound` and `density`
/// take their value from a `value` attribute or from the element text.
pub fn parse_material_file(text: &str) -> Result<BTreeMap<String, Material>, ConfigError> {
    let doc = parse_document(text)?;
    let root = Scope::root(&doc);
    if root.name() != "cfsMaterialDataBase" {
        return Err(root.error(format!(
            "root element must be `cfsMaterialDataBase`, found `{}`",
            root.name()
        )));
    }
    root.allow_attributes(&[])?;
    let mut out = BTreeMap::new();
    for m in root.children(&["material"])? {
        m.allow_attributes(&["name"])?;
        let name = m.required_attr("name")?.to_string();
        let material_error = |message: String| ConfigError::Material {
            location: m.location(),
            material: name.clone(),
            message,
        };
        if out.contains_key(&name) {
            return Err(material_error("defined twice".into()));
        }
        let children = m.children(&["speedOfSound", "density"])?;
        let c: f64 = match single(&children, "speedOfSound")? {
            Some(s) => s.value_or_text()?,
            None => return Err(material_error("missing speedOfSound".into())),
        };
        if !(c > 0.0) || !c.is_finite() {
            return Err(material_error(format!("speed of sound must be positive, got {c}")));
        }
        let density = match single(&children, "density")? {
            Some(d) => {
                let rho: f64 = d.value_or_text()?;
                if !(rho > 0.0) || !rho.is_finite() {
                    return Err(material_error(format!("density must be positive, got {rho}")));
                }
                log::debug!("material `{name}`: density {rho} is not used by the acoustic PDE");
                Some(rho)
            }
            None => None,
        };
        out.insert(name.clone(), Material { name, c, density });
    }
    if out.is_empty() {
        return Err(root.missing("material"));
    }
    Ok(out)
}

pub fn read_material_file(path: impl AsRef<Path>) -> Result<BTreeMap<String, Material>, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_material_file(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attribute_or_text() {
        let text = r#"<cfsMaterialDataBase xmlns="http://www.cfs++.org/material">
  <material name="air"><speedOfSound value="343"/><density>1.2</density></material>
  <material name="water"><speedOfSound>1480</speedOfSound></material>
</cfsMaterialDataBase>"#;
        let mats = parse_material_file(text).unwrap();
        assert_eq!(mats.len(), 2);
        assert_eq!(mats["air"].c, 343.0);
        assert_eq!(mats["air"].density, Some(1.2));
        assert_eq!(mats["water"].c, 1480.0);
    }

    #[test]
    fn non_positive_speed_names_material() {
        let text =
            r#"<cfsMaterialDataBase><material name="bad"><speedOfSound value="-1"/></material></cfsMaterialDataBase>"#;
        match parse_material_file(text).unwrap_err() {
            ConfigError::Material { material, .. } => assert_eq!(material, "bad"),
            other => panic!("unexpected {other}"),
        }
        let text = r#"<cfsMaterialDataBase><material name="none"/></cfsMaterialDataBase>"#;
        assert!(matches!(parse_material_file(text), Err(ConfigError::Material { .. })));
    }
}
