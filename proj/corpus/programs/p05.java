public class TriangleSum {
    public static int main(String[] args) {
        int m = 4;
        int[] cols = {2, 5, 1, 3};
        int best = 0;
        int steps = 0;
        for (int z = m - 1; z >= 0; --z) {
            for (int i = 0; i <= z; ++i) {
                int y = z - i;
                steps++;
                if (cols[i] + y > best) {
                    best = cols[i] + y;
                }
            }
        }
        return best;
    }
}
