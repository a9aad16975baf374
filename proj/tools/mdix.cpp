#include <iostream>

int main() {
  std::cout << "mdix: commands pending\n";
  return 0;
}
