namespace pmaass {
// placeholder while the module lands
}
