#include <cstdio>

int main() {
  std::puts("fdnoma: placeholder");
  return 0;
}
