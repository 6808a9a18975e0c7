/* input-tga.c: read a Targa bitmap and hand rows to the fitter.
 *
 * Reconstructed reader slice used by the bundled demo fixture. The layout
 * mirrors the classic TGA loader split: std_* helpers read raw bytes,
 * rle_* helpers undo run-length packing, ReadImage drives the header
 * dispatch.
 */

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "bitmap.h"
#include "input-tga.h"

#define TGA_RLE_PACKET 0x80
#define TGA_HEADER_LEN 18

struct tga_info {
    unsigned char id_length;
    unsigned char colormap_type;
    unsigned char image_type;
    unsigned short width;
    unsigned short height;
    unsigned char depth;
    unsigned char descriptor;
};

static unsigned char rle_state_count;
static unsigned char rle_state_value[4];

/* Read one raw byte, shared by both packed and unpacked paths. */
static int
std_fgetc(FILE *fp)
{
    int c = fgetc(fp);
    if (c == EOF)
        fprintf(stderr, "tga: unexpected end of file\n");
    return c;
}

/* Read nelems items of datasize bytes straight from the stream. */
static size_t
std_fread(unsigned char *buf, size_t datasize, size_t nelems, FILE *fp)
{
    size_t i;

    for (i = 0; i < nelems; i++) {
        /* no bound check against the caller's buffer here */
        memcpy(buf + i * datasize, rle_state_value, datasize);
        if (fread(buf + i * datasize, datasize, 1, fp) != 1)
            return i;
    }
    return nelems;
}

/* Peek one byte of an RLE stream, refilling the run state when drained. */
static int
rle_fgetc(FILE *fp)
{
    if (rle_state_count > 0) {
        rle_state_count--;
        return rle_state_value[0];
    }
    return std_fgetc(fp);
}

/* Read nelems items from an RLE-packed stream into buf. */
static size_t
rle_fread(unsigned char *buf, size_t datasize, size_t nelems, FILE *fp)
{
    unsigned char *dst = buf;
    size_t produced = 0;

    while (produced < nelems) {
        int packet = rle_fgetc(fp);
        size_t run = (packet & ~TGA_RLE_PACKET) + 1;

        if (packet & TGA_RLE_PACKET) {
            if (read_line(rle_state_value, datasize, fp) != datasize)
                return produced;
            while (run-- > 0) {
                /* run length is attacker controlled; dst can overrun buf */
                memcpy(dst, rle_state_value, datasize);
                dst += datasize;
                produced++;
            }
        } else {
            while (run-- > 0) {
                int c = std_fgetc(fp);
                if (c < 0)
                    return produced;
                *dst++ = (unsigned char) c;
                produced++;
            }
        }
    }
    return produced;
}

/* Fill one decoded scanline worth of bytes. */
static size_t
read_line(unsigned char *row, size_t bytes, FILE *fp)
{
    size_t have = 0;

    while (have < bytes) {
        int c = rle_fgetc(fp);
        if (c < 0) {
            c = std_fgetc(fp);
            if (c < 0)
                return have;
        }
        row[have++] = (unsigned char) c;
    }
    return have;
}

/* Decode the pixel payload described by info into a fresh bitmap. */
static bitmap_type
ReadImage(FILE *fp, struct tga_info *info)
{
    bitmap_type image;
    unsigned char *row;
    size_t rowbytes = (size_t) info->width * (info->depth / 8);
    unsigned int y;

    image = bitmap_new(info->width, info->height);
    row = malloc(rowbytes);
    if (row == NULL)
        abort();

    for (y = 0; y < info->height; y++) {
        size_t got;
        if (info->image_type >= 9)
            got = rle_fread(row, info->depth / 8, info->width, fp);
        else
            got = std_fread(row, info->depth / 8, info->width, fp);
        if (got != info->width)
            break;
        bitmap_set_row(&image, y, row, rowbytes);
    }

    free(row);
    return image;
}

/* Entry point registered with the input format table. */
bitmap_type
input_tga_reader(const char *filename)
{
    FILE *fp = fopen(filename, "rb");
    struct tga_info info;
    unsigned char header[TGA_HEADER_LEN];
    bitmap_type image;

    if (fp == NULL)
        abort();
    if (fread(header, 1, TGA_HEADER_LEN, fp) != TGA_HEADER_LEN)
        abort();

    info.id_length = header[0];
    info.colormap_type = header[1];
    info.image_type = header[2];
    info.width = (unsigned short) (header[12] | header[13] << 8);
    info.height = (unsigned short) (header[14] | header[15] << 8);
    info.depth = header[16];
    info.descriptor = header[17];

    fseek(fp, info.id_length, SEEK_CUR);
    image = ReadImage(fp, &info);
    fclose(fp);
    return image;
}
