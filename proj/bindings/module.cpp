#include <pybind11/pybind11.h>
PYBIND11_MODULE(_avsim, m) { m.doc() = "avsim"; }
