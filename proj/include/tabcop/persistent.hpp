#pragma once

// Immutable structure-sharing containers used by prover states. Every MCTS
// node owns a full state, so copies must be O(1) and updates must share the
// untouched parts with the parent.

#include <array>
#include <cstddef>
#include <iterator>
#include <memory>
#include <optional>
#include <vector>

#include "tabcop/term.hpp"

namespace tabcop {

// Singly linked cons list; push_front shares the tail.
template <class T>
class PList {
  struct Cell {
    T head;
    std::shared_ptr<const Cell> tail;
    std::size_t size;
  };

public:
  class iterator {
  public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = T;
    using difference_type = std::ptrdiff_t;
    using pointer = const T*;
    using reference = const T&;

    iterator() = default;
    explicit iterator(const Cell* c) : cell_(c) {}
    reference operator*() const { return cell_->head; }
    pointer operator->() const { return &cell_->head; }
    iterator& operator++() {
      cell_ = cell_->tail.get();
      return *this;
    }
    iterator operator++(int) {
      iterator tmp = *this;
      ++*this;
      return tmp;
    }
    friend bool operator==(const iterator& a, const iterator& b) { return a.cell_ == b.cell_; }
    friend bool operator!=(const iterator& a, const iterator& b) { return a.cell_ != b.cell_; }

  private:
    const Cell* cell_ = nullptr;
  };

  PList() = default;

  bool empty() const { return !cell_; }
  std::size_t size() const { return cell_ ? cell_->size : 0; }
  const T& front() const { return cell_->head; }
  PList pop_front() const { return PList(cell_->tail); }
  PList push_front(T value) const {
    return PList(std::make_shared<const Cell>(Cell{std::move(value), cell_, size() + 1}));
  }
  iterator begin() const { return iterator(cell_.get()); }
  iterator end() const { return iterator(); }

  const T& operator[](std::size_t i) const {
    const Cell* c = cell_.get();
    while (i--) c = c->tail.get();
    return c->head;
  }

  std::vector<T> to_vector() const { return std::vector<T>(begin(), end()); }

  ~PList() {
    // Iterative release so very long lists do not recurse on destruction.
    while (cell_ && cell_.use_count() == 1) {
      auto next = cell_->tail;
      cell_ = std::move(next);
    }
  }
  PList(const PList&) = default;
  PList(PList&&) noexcept = default;
  PList& operator=(const PList&) = default;
  PList& operator=(PList&&) noexcept = default;

private:
  explicit PList(std::shared_ptr<const Cell> c) : cell_(std::move(c)) {}
  std::shared_ptr<const Cell> cell_;
};

// Persistent array of variable bindings indexed by VarId: a 16-way trie with
// path copying. Nodes created by this instance and not yet shared are updated
// in place, so a batch of bindings from one unifier copies each node once.
class Bindings {
public:
  const Term* get(VarId v) const;
  void set(VarId v, const Term& t);
  std::size_t bound_count() const { return count_; }

  // Follows variable chains until an unbound variable or a non-variable.
  Term walk(Term t) const;
  // Fully applies the bindings.
  Term resolve(const Term& t) const;
  Literal resolve(const Literal& l) const;

private:
  static constexpr unsigned kBits = 4;
  static constexpr std::size_t kWidth = std::size_t{1} << kBits;
  struct Node {
    std::array<std::shared_ptr<Node>, kWidth> kids;
    std::array<std::optional<Term>, kWidth> slots;
  };

  std::shared_ptr<Node> root_;
  unsigned levels_ = 0; // number of inner levels above the leaves
  std::size_t count_ = 0;
};

} // namespace tabcop
