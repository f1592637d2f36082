"""Reference Zhang-Suen thinning, textbook two-subiteration form.

Prints the foreground pixel coordinates of the thinned fixtures so they can be
frozen into the C++ tests. Run: python3 tests/oracles/zhang_suen.py
"""


def thin(img):
    h, w = len(img), len(img[0])
    img = [row[:] for row in img]

    def px(y, x):
        return img[y][x] if 0 <= y < h and 0 <= x < w else 0

    def neighbours(y, x):
        # P2..P9: N, NE, E, SE, S, SW, W, NW
        return [px(y - 1, x), px(y - 1, x + 1), px(y, x + 1), px(y + 1, x + 1),
                px(y + 1, x), px(y + 1, x - 1), px(y, x - 1), px(y - 1, x - 1)]

    changed = True
    while changed:
        changed = False
        for step in (0, 1):
            marked = []
            for y in range(h):
                for x in range(w):
                    if not img[y][x]:
                        continue
                    p = neighbours(y, x)
                    p2, p3, p4, p5, p6, p7, p8, p9 = p
                    b = sum(p)
                    seq = p + [p[0]]
                    a = sum(1 for i in range(8) if seq[i] == 0 and seq[i + 1] == 1)
                    if not (2 <= b <= 6 and a == 1):
                        continue
                    if step == 0 and p2 * p4 * p6 == 0 and p4 * p6 * p8 == 0:
                        marked.append((y, x))
                    if step == 1 and p2 * p4 * p8 == 0 and p2 * p6 * p8 == 0:
                        marked.append((y, x))
            for y, x in marked:
                img[y][x] = 0
            changed = changed or bool(marked)
    return img


def blank(w, h):
    return [[0] * w for _ in range(h)]


def fill(img, x0, y0, x1, y1):
    for y in range(y0, y1 + 1):
        for x in range(x0, x1 + 1):
            img[y][x] = 1


def dump(name, img):
    pts = [(x, y) for y, row in enumerate(img) for x, v in enumerate(row) if v]
    print(f"{name} ({len(pts)} px):")
    print("  " + ", ".join(f"{{{x}, {y}}}" for x, y in pts))


if __name__ == "__main__":
    bar = blank(51, 9)
    fill(bar, 10, 3, 40, 5)
    dump("bar 3x31 at columns 10-40, rows 3-5 of 51x9", thin(bar))

    block = blank(12, 12)
    fill(block, 2, 2, 8, 8)
    dump("7x7 block at 2..8 of 12x12", thin(block))

    ell = blank(16, 16)
    fill(ell, 3, 2, 5, 12)
    fill(ell, 3, 10, 13, 12)
    dump("L: 3-wide vertical 3..5 x 2..12 plus horizontal 3..13 x 10..12 of 16x16", thin(ell))
