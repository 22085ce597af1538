#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include "pinn/runtime.hpp"

int main(int argc, char** argv) {
  pinn::keep_freed_heap();
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
