#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "ime/fingerprint.hpp"

using ime::sha256;
using ime::to_hex;

TEST_CASE("sha256 matches the published test vectors") {
  CHECK(to_hex(sha256("")) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(to_hex(sha256("abc")) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(to_hex(sha256("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")) ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  CHECK(to_hex(sha256(std::string(1000000, 'a'))) ==
        "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("sha256 streaming equals one-shot") {
  std::string data;
  for (int i = 0; i < 1000; ++i) data += "payload block " + std::to_string(i) + "\n";
  ime::detail::Sha256 h;
  // Uneven chunk sizes cross the 64-byte block boundary in every phase.
  std::size_t off = 0;
  std::size_t step = 1;
  while (off < data.size()) {
    std::size_t take = std::min(step, data.size() - off);
    h.update(data.data() + off, take);
    off += take;
    step = (step * 7 + 3) % 97 + 1;
  }
  CHECK(to_hex(h.finish()) == to_hex(sha256(data)));
}

TEST_CASE("sha256 distinguishes nearby inputs") {
  CHECK(to_hex(sha256("abc")) != to_hex(sha256("abd")));
  CHECK(to_hex(sha256("abc")) != to_hex(sha256("abc\0", 4)));
}
