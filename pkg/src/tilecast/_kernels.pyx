# cython: language_level=3, boundscheck=False, wraparound=False
"""Native pixel kernels: grid signature sweep and raster copy primitives.

MD5 comes from OpenSSL's EVP interface; the per-tile digest input is
url || 0x00 || "col,row" || 0x00 || raw RGBA rows, identical to
protocol.tile_signature and _kernels_py.
"""

from cpython.bytes cimport PyBytes_FromStringAndSize
from libc.stdio cimport snprintf
from libc.string cimport memcpy

cdef extern from "openssl/evp.h":
    ctypedef struct EVP_MD_CTX:
        pass
    ctypedef struct EVP_MD:
        pass
    EVP_MD_CTX *EVP_MD_CTX_new() nogil
    void EVP_MD_CTX_free(EVP_MD_CTX *ctx) nogil
    const EVP_MD *EVP_md5() nogil
    int EVP_DigestInit_ex(EVP_MD_CTX *ctx, const EVP_MD *type, void *impl) nogil
    int EVP_DigestUpdate(EVP_MD_CTX *ctx, const void *d, size_t cnt) nogil
    int EVP_DigestFinal_ex(EVP_MD_CTX *ctx, unsigned char *md, unsigned int *s) nogil

BACKEND = "native"

cdef const char *_HEX = "0123456789abcdef"


cdef str _hex32(const unsigned char *digest):
    cdef char out[32]
    cdef int i
    for i in range(16):
        out[2 * i] = _HEX[digest[i] >> 4]
        out[2 * i + 1] = _HEX[digest[i] & 0x0F]
    return PyBytes_FromStringAndSize(out, 32).decode("ascii")


def md5_hex(const unsigned char[::1] data) -> str:
    cdef unsigned char digest[16]
    cdef unsigned int dlen = 0
    cdef EVP_MD_CTX *ctx = EVP_MD_CTX_new()
    if ctx == NULL:
        raise MemoryError("EVP_MD_CTX_new failed")
    try:
        if EVP_DigestInit_ex(ctx, EVP_md5(), NULL) != 1:
            raise RuntimeError("EVP md5 init failed")
        if data.shape[0] > 0:
            if EVP_DigestUpdate(ctx, &data[0], <size_t>data.shape[0]) != 1:
                raise RuntimeError("EVP update failed")
        if EVP_DigestFinal_ex(ctx, digest, &dlen) != 1:
            raise RuntimeError("EVP final failed")
    finally:
        EVP_MD_CTX_free(ctx)
    return _hex32(digest)


def grid_signatures(const unsigned char[::1] url,
                    const unsigned char[::1] data,
                    int width, int height) -> list:
    """Signatures for every grid tile of a full-page raster, row-major."""
    if width < 1 or height < 1:
        raise ValueError(f"raster must be positive-sized, got {width}x{height}")
    if data.shape[0] != <Py_ssize_t>4 * width * height:
        raise ValueError(f"raster length {data.shape[0]} != 4*{width}*{height}")

    cdef int cols = (width + 255) // 256
    cdef int rows = (height + 255) // 256
    cdef int ntiles = cols * rows
    cdef bytearray digests = bytearray(16 * ntiles)
    cdef unsigned char[::1] dg = digests

    cdef const unsigned char *raster = NULL
    cdef const unsigned char *url_p = NULL
    if data.shape[0] > 0:
        raster = &data[0]
    cdef Py_ssize_t url_len = url.shape[0]
    if url_len > 0:
        url_p = &url[0]

    cdef EVP_MD_CTX *ctx = EVP_MD_CTX_new()
    if ctx == NULL:
        raise MemoryError("EVP_MD_CTX_new failed")

    cdef char posbuf[32]
    cdef int poslen
    cdef int r, c, x0, y0, tw, th, j
    cdef size_t stride = 4 * <size_t>width
    cdef const unsigned char *row_p
    cdef unsigned int dlen = 0
    cdef int ok = 1
    cdef int idx = 0
    with nogil:
        for r in range(rows):
            y0 = r * 256
            th = height - y0
            if th > 256:
                th = 256
            for c in range(cols):
                x0 = c * 256
                tw = width - x0
                if tw > 256:
                    tw = 256
                if EVP_DigestInit_ex(ctx, EVP_md5(), NULL) != 1:
                    ok = 0
                    break
                if url_len > 0:
                    ok &= EVP_DigestUpdate(ctx, url_p, <size_t>url_len)
                ok &= EVP_DigestUpdate(ctx, "\x00", 1)
                poslen = snprintf(posbuf, sizeof(posbuf), "%d,%d", c, r)
                ok &= EVP_DigestUpdate(ctx, posbuf, <size_t>poslen)
                ok &= EVP_DigestUpdate(ctx, "\x00", 1)
                row_p = raster + <size_t>y0 * stride + 4 * <size_t>x0
                for j in range(th):
                    ok &= EVP_DigestUpdate(ctx, row_p, 4 * <size_t>tw)
                    row_p += stride
                ok &= EVP_DigestFinal_ex(ctx, &dg[16 * idx], &dlen)
                idx += 1
                if not ok:
                    break
            if not ok:
                break
    EVP_MD_CTX_free(ctx)
    if not ok:
        raise RuntimeError("EVP digest failed")

    out = []
    for j in range(ntiles):
        out.append(_hex32(&dg[16 * j]))
    return out


def crop_rgba(const unsigned char[::1] data, int width, int height,
              int x, int y, int w, int h) -> bytes:
    """Copy a sub-rectangle out of a raster."""
    if w < 1 or h < 1:
        raise ValueError(f"crop must be positive-sized, got {w}x{h}")
    if x < 0 or y < 0 or x + w > width or y + h > height:
        raise ValueError(f"crop {w}x{h}@({x},{y}) outside {width}x{height}")
    if data.shape[0] != <Py_ssize_t>4 * width * height:
        raise ValueError(f"raster length {data.shape[0]} != 4*{width}*{height}")
    out = PyBytes_FromStringAndSize(NULL, <Py_ssize_t>4 * w * h)
    cdef unsigned char *dst = <unsigned char *><char *>out
    cdef const unsigned char *src = &data[0]
    cdef size_t stride = 4 * <size_t>width
    cdef size_t row_bytes = 4 * <size_t>w
    cdef const unsigned char *row_p = src + <size_t>y * stride + 4 * <size_t>x
    cdef int j
    with nogil:
        for j in range(h):
            memcpy(dst + <size_t>j * row_bytes, row_p, row_bytes)
            row_p += stride
    return out


def paste_rgba(const unsigned char[::1] data, int width, int height,
               const unsigned char[::1] patch, int pw, int ph,
               int x, int y) -> bytes:
    """New raster with patch composited at (x, y); zero-area patch is identity."""
    if width < 1 or height < 1:
        raise ValueError(f"raster must be positive-sized, got {width}x{height}")
    if data.shape[0] != <Py_ssize_t>4 * width * height:
        raise ValueError(f"raster length {data.shape[0]} != 4*{width}*{height}")
    out = PyBytes_FromStringAndSize(<const char *>&data[0], data.shape[0])
    if pw == 0 or ph == 0:
        return out
    if pw < 0 or ph < 0:
        raise ValueError(f"patch must be non-negative-sized, got {pw}x{ph}")
    if x < 0 or y < 0 or x + pw > width or y + ph > height:
        raise ValueError(f"patch {pw}x{ph}@({x},{y}) outside {width}x{height}")
    if patch.shape[0] != <Py_ssize_t>4 * pw * ph:
        raise ValueError(f"patch length {patch.shape[0]} != 4*{pw}*{ph}")
    cdef unsigned char *dst = <unsigned char *><char *>out
    cdef const unsigned char *src = &patch[0]
    cdef size_t stride = 4 * <size_t>width
    cdef size_t prow = 4 * <size_t>pw
    cdef unsigned char *row_p = dst + <size_t>y * stride + 4 * <size_t>x
    cdef int j
    with nogil:
        for j in range(ph):
            memcpy(row_p, src + <size_t>j * prow, prow)
            row_p += stride
    return out
