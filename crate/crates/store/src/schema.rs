//! Schema generation: one unary table per class, one binary table per
//! property, with a deterministic name-collision scheme.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use ontomon_core::Ontology;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnType {
    Id,
    Text,
    Real,
    Integer,
    Timestamp,
}

impl ColumnType {
    fn ddl(&self) -> &'static str {
        match self {
            ColumnType::Id => "VARCHAR",
            ColumnType::Text => "VARCHAR",
            ColumnType::Real => "DOUBLE PRECISION",
            ColumnType::Integer => "BIGINT",
            ColumnType::Timestamp => "TIMESTAMP",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub ctype: ColumnType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableDef {
    pub name: String,
    pub columns: Vec<Column>,
    pub primary_key: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelationalSchema {
    pub tables: Vec<TableDef>,
}

impl RelationalSchema {
    pub fn table(&self, name: &str) -> Option<&TableDef> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Standard CREATE TABLE text for the whole schema.
    pub fn ddl(&self) -> String {
        let mut out = String::new();
        for t in &self.tables {
            let cols: Vec<String> =
                t.columns.iter().map(|c| format!("{} {}", c.name, c.ctype.ddl())).collect();
            let _ = writeln!(
                out,
                "CREATE TABLE {} ({}, PRIMARY KEY ({}));",
                t.name,
                cols.join(", "),
                t.primary_key.join(", ")
            );
        }
        out
    }
}

/// Class/property to table correspondence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Mapping {
    /// class -> table
    pub class_map: BTreeMap<String, String>,
    /// object property -> (table, subject column, object column)
    pub obj_prop_map: BTreeMap<String, (String, String, String)>,
    /// data property -> (table, subject column, value column)
    pub data_prop_map: BTreeMap<String, (String, String, String)>,
}

fn table_name(used: &mut BTreeSet<String>, base: &str) -> String {
    let base = base.to_lowercase();
    let mut name = base.clone();
    let mut n = 1;
    while used.contains(&name) {
        n += 1;
        name = format!("{base}_{n}");
    }
    used.insert(name.clone());
    name
}

/// Derive the relational schema and mapping for an ontology. Deterministic:
/// classes first, then object properties, then data properties, each in
/// sorted order.
pub fn generate_schema(o: &Ontology) -> (RelationalSchema, Mapping) {
    let mut schema = RelationalSchema::default();
    let mut mapping = Mapping::default();
    let mut used = BTreeSet::new();

    for class in &o.classes {
        let table = table_name(&mut used, class);
        schema.tables.push(TableDef {
            name: table.clone(),
            columns: vec![Column { name: "id".into(), ctype: ColumnType::Id }],
            primary_key: vec!["id".into()],
        });
        mapping.class_map.insert(class.clone(), table);
    }
    for prop in &o.object_properties {
        let table = table_name(&mut used, prop);
        schema.tables.push(TableDef {
            name: table.clone(),
            columns: vec![
                Column { name: "s".into(), ctype: ColumnType::Id },
                Column { name: "o".into(), ctype: ColumnType::Id },
            ],
            primary_key: vec!["s".into(), "o".into()],
        });
        mapping.obj_prop_map.insert(prop.clone(), (table, "s".into(), "o".into()));
    }
    for prop in &o.data_properties {
        let table = table_name(&mut used, prop);
        schema.tables.push(TableDef {
            name: table.clone(),
            columns: vec![
                Column { name: "s".into(), ctype: ColumnType::Id },
                Column { name: "v".into(), ctype: ColumnType::Text },
            ],
            primary_key: vec!["s".into(), "v".into()],
        });
        mapping.data_prop_map.insert(prop.clone(), (table, "s".into(), "v".into()));
    }
    (schema, mapping)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ontomon_core::parse_ontology;

    #[test]
    fn empty_ontology_yields_empty_schema() {
        let (schema, mapping) = generate_schema(&Ontology::new());
        assert!(schema.tables.is_empty());
        assert!(mapping.class_map.is_empty());
    }

    #[test]
    fn generation_is_deterministic() {
        let o = parse_ontology("Class(B) Class(A) ObjectProperty(p) DataProperty(d)").unwrap();
        let (s1, m1) = generate_schema(&o);
        let (s2, m2) = generate_schema(&o);
        assert_eq!(s1.ddl(), s2.ddl());
        assert_eq!(m1, m2);
    }

    #[test]
    fn mapping_targets_exist_in_schema() {
        let o = parse_ontology("Class(ITU) Class(Event) ObjectProperty(occursAt) DataProperty(atTime)")
            .unwrap();
        let (schema, mapping) = generate_schema(&o);
        for t in mapping
            .class_map
            .values()
            .chain(mapping.obj_prop_map.values().map(|(t, _, _)| t))
            .chain(mapping.data_prop_map.values().map(|(t, _, _)| t))
        {
            assert!(schema.table(t).is_some(), "mapping target {t} missing from schema");
        }
        assert_eq!(schema.tables.len(), 4);
    }

    #[test]
    fn name_collisions_resolved_deterministically() {
        // Class `Itu` and property `itu` lowercase to the same table name.
        let o = parse_ontology("Class(Itu) ObjectProperty(itu)").unwrap();
        let (schema, mapping) = generate_schema(&o);
        assert_eq!(mapping.class_map["Itu"], "itu");
        assert_eq!(mapping.obj_prop_map["itu"].0, "itu_2");
        assert_eq!(schema.tables.len(), 2);
    }
}
