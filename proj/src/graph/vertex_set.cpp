#include "cognate/graph.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace cognate {

namespace {
std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }
}  // namespace

VertexSet::VertexSet(std::size_t capacity) : words_(words_for(capacity), 0), capacity_(capacity) {}

VertexSet::VertexSet(std::initializer_list<Address> members) {
  for (Address a : members) insert(a);
}

VertexSet VertexSet::full(std::size_t capacity) {
  VertexSet s(capacity);
  for (std::size_t i = 0; i < capacity; ++i) s.insert(Address{static_cast<std::uint32_t>(i)});
  return s;
}

void VertexSet::grow(std::size_t capacity) {
  if (capacity <= capacity_) return;
  capacity_ = capacity;
  words_.resize(words_for(capacity), 0);
}

void VertexSet::insert(Address a) {
  if (a.id >= capacity_) grow(std::max<std::size_t>(a.id + 1, capacity_ * 2));
  words_[a.id >> 6] |= std::uint64_t{1} << (a.id & 63);
}

void VertexSet::erase(Address a) noexcept {
  if (a.id < capacity_) words_[a.id >> 6] &= ~(std::uint64_t{1} << (a.id & 63));
}

void VertexSet::clear() noexcept { std::fill(words_.begin(), words_.end(), 0); }

std::size_t VertexSet::size() const noexcept {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool VertexSet::empty() const noexcept {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

bool VertexSet::is_subset_of(const VertexSet& other) const noexcept {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    const std::uint64_t theirs = i < other.words_.size() ? other.words_[i] : 0;
    if ((words_[i] & ~theirs) != 0) return false;
  }
  return true;
}

bool VertexSet::intersects(const VertexSet& other) const noexcept {
  const std::size_t n = std::min(words_.size(), other.words_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if ((words_[i] & other.words_[i]) != 0) return true;
  }
  return false;
}

VertexSet& VertexSet::operator|=(const VertexSet& other) {
  grow(other.capacity_);
  for (std::size_t i = 0; i < other.words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

VertexSet& VertexSet::operator&=(const VertexSet& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    words_[i] &= i < other.words_.size() ? other.words_[i] : 0;
  }
  return *this;
}

VertexSet& VertexSet::operator-=(const VertexSet& other) {
  const std::size_t n = std::min(words_.size(), other.words_.size());
  for (std::size_t i = 0; i < n; ++i) words_[i] &= ~other.words_[i];
  return *this;
}

bool operator==(const VertexSet& a, const VertexSet& b) noexcept {
  const std::size_t n = std::max(a.words_.size(), b.words_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t x = i < a.words_.size() ? a.words_[i] : 0;
    const std::uint64_t y = i < b.words_.size() ? b.words_[i] : 0;
    if (x != y) return false;
  }
  return true;
}

std::vector<Address> VertexSet::to_vector() const {
  std::vector<Address> out;
  out.reserve(size());
  for_each([&](Address a) { out.push_back(a); });
  return out;
}

std::string to_string(const VertexSet& s) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  s.for_each([&](Address a) {
    if (!first) os << ", ";
    first = false;
    os << a.id;
  });
  os << '}';
  return os.str();
}

Relation::Relation(VertexSet left, VertexSet right)
    : left_(std::move(left)), right_(std::move(right)), rows_(left_.capacity()) {}

void Relation::add(Address x, Address y) {
  if (!left_.contains(x) || !right_.contains(y)) {
    throw UniverseError("relation pair (" + std::to_string(x.id) + ", " + std::to_string(y.id) +
                        ") outside declared universes");
  }
  rows_[x.id].insert(y);
}

bool Relation::contains(Address x, Address y) const noexcept { return row(x).contains(y); }

const VertexSet& Relation::row(Address x) const noexcept {
  return x.id < rows_.size() ? rows_[x.id] : empty_;
}

std::size_t Relation::size() const noexcept {
  std::size_t n = 0;
  for (const VertexSet& r : rows_) n += r.size();
  return n;
}

std::vector<std::pair<Address, Address>> Relation::pairs() const {
  std::vector<std::pair<Address, Address>> out;
  left_.for_each([&](Address x) { row(x).for_each([&](Address y) { out.emplace_back(x, y); }); });
  return out;
}

Relation Relation::converse() const {
  Relation r(right_, left_);
  for (const auto& [x, y] : pairs()) r.add(y, x);
  return r;
}

bool operator==(const Relation& a, const Relation& b) noexcept {
  if (!(a.left_ == b.left_) || !(a.right_ == b.right_)) return false;
  bool same = true;
  a.left_.for_each([&](Address x) { same = same && a.row(x) == b.row(x); });
  return same;
}

}  // namespace cognate
