pub use wharf_core as core_reexport;
