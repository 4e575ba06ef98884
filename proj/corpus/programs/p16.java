public class ClimbStairs {
    static int ways(int n) {
        if (n <= 2) {
            return n;
        }
        int a = 1;
        int b = 2;
        for (int i = 3; i <= n; i++) {
            int c = a + b;
            a = b;
            b = c;
        }
        return b;
    }

    public static int main(String[] args) {
        int n = 5;
        int total = ways(n);
        return total;
    }
}
