#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "rnc/core.hpp"

using namespace rnc;

TEST_CASE("moduli validation") {
  const ModuliSet ms({17, 19});
  CHECK(ms.count() == 2);
  CHECK(ms.dynamic_range() == 323);

  const ModuliSet small({4, 7});
  CHECK(small.dynamic_range() == 28);

  // Reports the first offending pair in input order.
  CHECK_THROWS_WITH_AS(ModuliSet({12, 14, 7}),
                       "moduli are not pairwise coprime: gcd(12, 14) > 1",
                       NotCoprimeError);
  try {
    ModuliSet({12, 14, 7});
  } catch (const NotCoprimeError& e) {
    CHECK(e.first() == 12);
    CHECK(e.second() == 14);
  }

  CHECK_THROWS_AS(ModuliSet({1, 7}), ModulusTooSmallError);
  CHECK_THROWS_AS(ModuliSet({0}), ModulusTooSmallError);
  CHECK_THROWS_AS(ModuliSet({17, 17}), NotCoprimeError);
  CHECK_THROWS_AS(ModuliSet({}), Error);
  CHECK_THROWS_AS(ModuliSet({std::uint64_t{1} << 33, 7}), OutOfRangeError);

  // 2^32-scale moduli overflow the 64-bit range at three factors.
  CHECK_THROWS_AS(
      ModuliSet({0xFFFFFFFFull, 0xFFFFFFFDull, 0xFFFFFFFBull}),
      DynamicRangeTooLargeError);

  // Input order does not matter, storage is sorted.
  const ModuliSet unsorted({19, 17});
  CHECK(unsorted.modulus(0) == 17);
  CHECK(unsorted.modulus(1) == 19);
}

TEST_CASE("crt constants satisfy their defining congruence") {
  for (const auto& moduli :
       {std::vector<std::uint64_t>{17, 19}, {4, 7}, {5, 7, 11},
        {3, 5, 7, 11, 13}}) {
    const ModuliSet ms(moduli);
    for (std::size_t i = 0; i < ms.count(); ++i) {
      CHECK(ms.crt_weight(i) == ms.dynamic_range() / ms.modulus(i));
      CHECK(ms.crt_weight(i) % ms.modulus(i) * ms.crt_inverse(i) %
                ms.modulus(i) ==
            1);
    }
  }
}

TEST_CASE("extended gcd") {
  const Bezout a = extended_gcd(17, 19);
  CHECK(a.gcd == 1);
  CHECK(a.x == 9);
  CHECK(a.y == -8);
  CHECK(17 * a.x + 19 * a.y == 1);

  const Bezout base = extended_gcd(0, 7);
  CHECK(base.gcd == 7);
  CHECK(base.x == 0);
  CHECK(base.y == 1);

  const Bezout even = extended_gcd(12, 14);
  CHECK(even.gcd == 2);
  CHECK(12 * even.x + 14 * even.y == 2);

  CHECK_THROWS_AS(extended_gcd(0, 0), Error);
  CHECK_THROWS_AS(extended_gcd(-1, 3), Error);

  // Bezout identity on random pairs.
  Rng rng(42);
  for (int i = 0; i < 10'000; ++i) {
    const auto a64 = static_cast<std::int64_t>(rng() % 0xFFFFFFFFull);
    const auto b64 = static_cast<std::int64_t>(rng() % 0xFFFFFFFFull);
    if (a64 == 0 && b64 == 0) continue;
    const Bezout bz = extended_gcd(a64, b64);
    CHECK(bz.gcd == std::gcd(a64, b64));
    CHECK(static_cast<__int128>(a64) * bz.x +
              static_cast<__int128>(b64) * bz.y ==
          bz.gcd);
  }
}

TEST_CASE("encode produces the worked residues") {
  const ModuliSet ms({17, 19});
  const EncodedValue v29 = encode(ms, 29);
  CHECK(v29.components == std::vector<std::uint64_t>{12, 10});

  const EncodedValue zero = encode(ms, 0);
  CHECK(zero.components == std::vector<std::uint64_t>{0, 0});

  const ModuliSet small({4, 7});
  CHECK(encode(small, 5).components == std::vector<std::uint64_t>{1, 5});

  CHECK_THROWS_AS(encode(ms, 323), OutOfRangeError);
  CHECK_THROWS_AS(encode(ms, 1000), OutOfRangeError);
}

TEST_CASE("multiple shifting preserves the value") {
  const ModuliSet ms({17, 19});
  const EncodedValue v29 = encode(ms, 29);

  const std::uint64_t no_shift[] = {0, 0};
  CHECK(add_multiple_shift(ms, v29, no_shift).components ==
        std::vector<std::uint64_t>{12, 10});

  const std::uint64_t shift[] = {2, 3};
  const EncodedValue shifted = add_multiple_shift(ms, v29, shift);
  CHECK(shifted.components == std::vector<std::uint64_t>{46, 67});
  CHECK(canonicalize(ms, shifted).components ==
        std::vector<std::uint64_t>{12, 10});

  Rng rng(7);
  EncodedValue x = encode(ms, 201);
  for (int i = 0; i < 10'000; ++i) {
    x = add_random_shift(ms, std::move(x), rng);
    }
  CHECK(decode(ms, x) == 201);
}

TEST_CASE("canonicalize is idempotent") {
  const ModuliSet ms({17, 19});
  EncodedValue v{{46, 67}, ms.id()};
  const EncodedValue once = canonicalize(ms, v);
  CHECK(once.components == std::vector<std::uint64_t>{12, 10});
  CHECK(canonicalize(ms, once).components == once.components);
  const EncodedValue zero = canonicalize(ms, EncodedValue{{0, 0}, ms.id()});
  CHECK(zero.components == std::vector<std::uint64_t>{0, 0});
}

TEST_CASE("decode reconstructs the worked example") {
  const ModuliSet ms({17, 19});
  CHECK(decode(ms, EncodedValue{{5, 18}, ms.id()}) == 56);
  CHECK(decode(ms, EncodedValue{{0, 0}, ms.id()}) == 0);

  const ModuliSet other({4, 7});
  CHECK_THROWS_AS(decode(other, EncodedValue{{5, 18}, ms.id()}),
                  ModuliMismatchError);
}

TEST_CASE("exhaustive round-trip and garner agreement") {
  for (const auto& moduli :
       {std::vector<std::uint64_t>{4, 7}, {17, 19}, {5, 7, 11}}) {
    const ModuliSet ms(moduli);
    for (std::uint64_t v = 0; v < ms.dynamic_range(); ++v) {
      CHECK(decode(ms, encode(ms, v)) == v);
    }
    if (ms.count() == 2) {
      for (std::uint64_t v = 0; v < ms.dynamic_range(); ++v) {
        const EncodedValue e = encode(ms, v);
        CHECK(decode_two_mod(ms, e) == decode(ms, e));
      }
    }
  }
}

TEST_CASE("shift transparency across the whole range") {
  const ModuliSet ms({17, 19});
  Rng rng(99);
  for (std::uint64_t v = 0; v < ms.dynamic_range(); ++v) {
    CHECK(decode(ms, encode(ms, v, rng)) == v);
  }
}

TEST_CASE("mixed radix digits") {
  const ModuliSet ms({17, 19});
  CHECK(to_mixed_radix(ms, encode(ms, 56)).digits ==
        std::vector<std::uint64_t>{5, 3});  // 56 = 5 + 3*17
  CHECK(to_mixed_radix(ms, encode(ms, 29)).digits ==
        std::vector<std::uint64_t>{12, 1});  // 29 = 12 + 1*17
  CHECK(to_mixed_radix(ms, encode(ms, 0)).digits ==
        std::vector<std::uint64_t>{0, 0});

  // sum(d_i * weight_i) == decode(x), with shifted inputs, three moduli.
  const ModuliSet ms3({5, 7, 11});
  Rng rng(3);
  for (int i = 0; i < 10'000; ++i) {
    const std::uint64_t v = rng() % ms3.dynamic_range();
    const MixedRadixDigits d = to_mixed_radix(ms3, encode(ms3, v, rng));
    std::uint64_t acc = 0;
    std::uint64_t weight = 1;
    for (std::size_t k = 0; k < ms3.count(); ++k) {
      CHECK(d.digits[k] < ms3.modulus(k));
      acc += d.digits[k] * weight;
      weight *= ms3.modulus(k);
    }
    CHECK(acc == v);
  }
}

TEST_CASE("signed encoding slides the range") {
  const ModuliSet ms({17, 19});
  const EncodedValue minus_one = encode_signed(ms, -1);
  CHECK(decode(ms, minus_one) == 322);  // M - 1
  CHECK(decode_signed(ms, minus_one) == -1);

  const EncodedValue zero = encode_signed(ms, 0);
  CHECK(decode(ms, zero) == 0);
  CHECK(decode_signed(ms, zero) == 0);

  for (std::int64_t v = -161; v <= 161; ++v) {
    CHECK(decode_signed(ms, encode_signed(ms, v)) == v);
  }
  CHECK_THROWS_AS(encode_signed(ms, -162), OutOfRangeError);
  CHECK_THROWS_AS(encode_signed(ms, 162), OutOfRangeError);

  Rng rng(5);
  for (std::int64_t v = -161; v <= 161; v += 7) {
    CHECK(decode_signed(ms, encode_signed(ms, v, rng)) == v);
  }
}

TEST_CASE("decode counter increments only on decode") {
  const ModuliSet ms({17, 19});
  const std::uint64_t before = decode_call_count();
  Rng rng(1);
  const EncodedValue x = encode(ms, 100, rng);
  (void)canonicalize(ms, x);
  (void)to_mixed_radix(ms, x);
  CHECK(decode_call_count() == before);
  (void)decode(ms, x);
  CHECK(decode_call_count() == before + 1);
}
